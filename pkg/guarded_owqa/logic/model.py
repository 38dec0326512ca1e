# -*- coding: utf-8 -*-
# guarded_owqa/logic/model.py
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple, Union


class Kind(str, Enum):
    PRINCIPAL = "principal"
    SIDE = "side"


SOURCE = "source"

# purpose tags carried by generated relation symbols
TAG_SPLIT = "split"
TAG_CONST = "const"
TAG_TWIN = "twin"
TAG_LIN = "lin"


# =========================
# Terms
# =========================

@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Null:
    """Labelled null. Canonical types reuse nulls 1..k as their elements."""

    index: int

    def __str__(self) -> str:
        return f"n{self.index}"


Term = Union[Variable, Constant, Null]
Value = Union[Constant, Null]


def term_key(term: Term) -> Tuple[int, str, int]:
    if isinstance(term, Constant):
        return (0, term.name, 0)
    if isinstance(term, Null):
        return (1, "", term.index)
    return (2, term.name, 0)


def is_variable(term: Term) -> bool:
    return isinstance(term, Variable)


# =========================
# Relations & signature
# =========================

@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    kind: Kind = Kind.PRINCIPAL
    origin: str = SOURCE

    @property
    def is_side(self) -> bool:
        return self.kind is Kind.SIDE

    @property
    def is_generated(self) -> bool:
        return self.origin != SOURCE


@dataclass(frozen=True)
class Signature:
    relations: Tuple[Relation, ...] = ()

    @cached_property
    def _by_name(self) -> Dict[str, Relation]:
        return {r.name: r for r in self.relations}

    def get(self, name: str) -> Optional[Relation]:
        return self._by_name.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Relation]:
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    @cached_property
    def side_names(self) -> FrozenSet[str]:
        return frozenset(r.name for r in self.relations if r.is_side)

    def is_side(self, name: str) -> bool:
        return name in self.side_names

    def extend(self, relations: Iterable[Relation]) -> "Signature":
        extra = []
        seen = set(self._by_name)
        for rel in relations:
            if rel.name not in seen:
                seen.add(rel.name)
                extra.append(rel)
        return Signature(self.relations + tuple(extra)) if extra else self


# =========================
# Atoms, rules, instances
# =========================

@dataclass(frozen=True)
class Atom:
    relation: str
    args: Tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.relation}({','.join(str(a) for a in self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    @cached_property
    def variables(self) -> Tuple[Variable, ...]:
        return tuple(dict.fromkeys(a for a in self.args if isinstance(a, Variable)))

    @cached_property
    def values(self) -> FrozenSet[Value]:
        return frozenset(a for a in self.args if not isinstance(a, Variable))

    @cached_property
    def terms(self) -> FrozenSet[Term]:
        return frozenset(self.args)

    @property
    def is_ground(self) -> bool:
        return not self.variables

    @cached_property
    def pattern(self) -> Tuple[str, Tuple[int, ...]]:
        """Isomorphism class of the atom: relation plus the equality pattern of its arguments."""
        first: Dict[Term, int] = {}
        return (self.relation, tuple(first.setdefault(a, len(first)) for a in self.args))

    def substitute(self, mapping: Mapping[Term, Term]) -> "Atom":
        return Atom(self.relation, tuple(mapping.get(a, a) for a in self.args))

    def sort_key(self) -> tuple:
        return (self.relation, tuple(term_key(a) for a in self.args))


Fact = Atom


def ordered_unique(items: Iterable) -> tuple:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True)
class TGD:
    body: Tuple[Atom, ...]
    head: Tuple[Atom, ...]

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        head = ", ".join(str(a) for a in self.head)
        return f"{body} -> {head}"

    @cached_property
    def body_variables(self) -> Tuple[Variable, ...]:
        return ordered_unique(v for a in self.body for v in a.variables)

    @cached_property
    def head_variables(self) -> Tuple[Variable, ...]:
        return ordered_unique(v for a in self.head for v in a.variables)

    @cached_property
    def exported(self) -> Tuple[Variable, ...]:
        head = set(self.head_variables)
        return tuple(v for v in self.body_variables if v in head)

    @cached_property
    def existential(self) -> Tuple[Variable, ...]:
        body = set(self.body_variables)
        return tuple(v for v in self.head_variables if v not in body)

    @property
    def width(self) -> int:
        return len(self.exported)

    @property
    def is_full(self) -> bool:
        return not self.existential

    @property
    def is_linear(self) -> bool:
        return len(self.body) == 1

    @cached_property
    def guard_indices(self) -> Tuple[int, ...]:
        needed = set(self.body_variables)
        return tuple(i for i, a in enumerate(self.body) if needed <= set(a.variables))

    @property
    def is_guarded(self) -> bool:
        return bool(self.guard_indices)

    @cached_property
    def constants(self) -> FrozenSet[Constant]:
        return frozenset(
            t for a in self.body + self.head for t in a.args if isinstance(t, Constant)
        )

    def substitute(self, mapping: Mapping[Term, Term]) -> "TGD":
        return TGD(
            tuple(a.substitute(mapping) for a in self.body),
            tuple(a.substitute(mapping) for a in self.head),
        )


@dataclass(frozen=True)
class Instance:
    facts: FrozenSet[Atom] = frozenset()

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.sorted_facts())

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact: object) -> bool:
        return fact in self.facts

    @cached_property
    def active_domain(self) -> FrozenSet[Value]:
        return frozenset(v for f in self.facts for v in f.args)

    def sorted_facts(self) -> Tuple[Atom, ...]:
        return tuple(sorted(self.facts, key=Atom.sort_key))

    def union(self, facts: Iterable[Atom]) -> "Instance":
        return Instance(self.facts | frozenset(facts))


@dataclass(frozen=True)
class ConjunctiveQuery:
    atoms: Tuple[Atom, ...]

    def __str__(self) -> str:
        return ", ".join(str(a) for a in self.atoms)

    @cached_property
    def variables(self) -> Tuple[Variable, ...]:
        return ordered_unique(v for a in self.atoms for v in a.variables)

    @cached_property
    def constants(self) -> FrozenSet[Constant]:
        return frozenset(t for a in self.atoms for t in a.args if isinstance(t, Constant))


# =========================
# Rule sets & programs
# =========================

@dataclass(frozen=True)
class SignatureStats:
    a: int
    a_prime: int
    n_prime: int
    w: int
    w_prime: int


@dataclass(frozen=True)
class RuleSet:
    signature: Signature
    rules: Tuple[TGD, ...]

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[TGD]:
        return iter(self.rules)

    @property
    def side(self) -> FrozenSet[str]:
        return self.signature.side_names

    @cached_property
    def stats(self) -> SignatureStats:
        from .analysis import signature_stats

        return signature_stats(self.signature, self.rules)

    @cached_property
    def head_patterns(self) -> Dict[Tuple[str, Tuple[int, ...]], int]:
        """Isomorphism class of every head atom → id of the first rule carrying it."""
        out: Dict[Tuple[str, Tuple[int, ...]], int] = {}
        for rid, rule in enumerate(self.rules):
            for atom in rule.head:
                out.setdefault(atom.pattern, rid)
        return out

    @cached_property
    def full_rule_ids(self) -> Tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.rules) if r.is_full)

    @cached_property
    def non_full_rule_ids(self) -> Tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.rules) if not r.is_full)

    @cached_property
    def principal_rule_ids(self) -> Tuple[int, ...]:
        """Rules whose (single) head atom is principal."""
        return tuple(
            i for i, r in enumerate(self.rules)
            if r.head and not self.signature.is_side(r.head[0].relation)
        )


@dataclass(frozen=True)
class Program:
    signature: Signature
    tgds: Tuple[TGD, ...] = ()
    instance: Instance = field(default_factory=Instance)
    queries: Tuple[ConjunctiveQuery, ...] = ()

    @cached_property
    def ruleset(self) -> RuleSet:
        return RuleSet(self.signature, self.tgds)

    def with_instance(self, instance: Instance) -> "Program":
        return Program(self.signature, self.tgds, instance, self.queries)
