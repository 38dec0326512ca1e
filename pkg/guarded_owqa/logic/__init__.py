from .model import (
    Atom,
    ConjunctiveQuery,
    Constant,
    Fact,
    Instance,
    Kind,
    Null,
    Program,
    Relation,
    RuleSet,
    Signature,
    SignatureStats,
    TGD,
    Variable,
)

__all__ = [
    "Atom",
    "ConjunctiveQuery",
    "Constant",
    "Fact",
    "Instance",
    "Kind",
    "Null",
    "Program",
    "Relation",
    "RuleSet",
    "Signature",
    "SignatureStats",
    "TGD",
    "Variable",
]
