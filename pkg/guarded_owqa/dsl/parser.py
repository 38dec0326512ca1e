# -*- coding: utf-8 -*-
# guarded_owqa/dsl/parser.py
"""
Line-oriented program format.

    rel NAME/ARITY [side] [@tag]
    tgd ATOM, ... -> ATOM, ...        identifiers are variables, 'name is a constant
    fact ATOM                         bare identifiers are constants
    query ATOM, ...

'#' starts a comment. Head-only variables of a tgd are existential.
"""
from __future__ import annotations

import re
from typing import Callable, Dict, List, Tuple, Union

from ..exceptions import (
    ArityMismatchError,
    EmptyRuleError,
    ProgramSyntaxError,
    UndeclaredRelationError,
)
from ..logic.model import (
    SOURCE,
    Atom,
    ConjunctiveQuery,
    Constant,
    Instance,
    Kind,
    Program,
    Relation,
    Signature,
    TGD,
    Term,
    Variable,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9]+")


# =========================
# Scanner
# =========================

class _Line:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.lineno = lineno
        self.pos = 0

    def error(self, message: str, cls=ProgramSyntaxError, pos: int | None = None):
        col = (self.pos if pos is None else pos) + 1
        return cls(message, self.lineno, col)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def accept(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.accept(token):
            found = self.text[self.pos:self.pos + 1] or "end of line"
            raise self.error(f"expected '{token}', found '{found}'")

    def regex(self, pattern: re.Pattern, what: str) -> str:
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m:
            found = self.text[self.pos:self.pos + 1] or "end of line"
            raise self.error(f"expected {what}, found '{found}'")
        self.pos = m.end()
        return m.group(0)


TermReader = Callable[[str, bool], Term]


def _rule_term(name: str, quoted: bool) -> Term:
    return Constant(name) if quoted else Variable(name)


def _fact_term(name: str, quoted: bool) -> Term:
    return Constant(name)


def _atom(line: _Line, signature: Dict[str, Relation], term: TermReader) -> Atom:
    line.skip_ws()
    start = line.pos
    name = line.regex(_IDENT, "relation name")
    rel = signature.get(name)
    if rel is None:
        raise line.error(f"relation {name} is not declared", UndeclaredRelationError, start)
    line.expect("(")
    args: List[Term] = []
    while True:
        quoted = line.accept("'")
        args.append(term(line.regex(_IDENT, "term"), quoted))
        if line.accept(")"):
            break
        line.expect(",")
    if len(args) != rel.arity:
        raise line.error(
            f"{name} has arity {rel.arity} but is used with {len(args)} arguments",
            ArityMismatchError,
            start,
        )
    return Atom(name, tuple(args))


def _atom_list(line: _Line, signature, term: TermReader, stop: str | None) -> Tuple[Atom, ...]:
    atoms: List[Atom] = []
    if line.at_end() or (stop and line.peek(stop)):
        return ()
    while True:
        atoms.append(_atom(line, signature, term))
        if not line.accept(","):
            break
    return tuple(atoms)


def _declaration(line: _Line) -> Relation:
    name = line.regex(_IDENT, "relation name")
    line.expect("/")
    arity_pos = line.pos
    arity = int(line.regex(_NUMBER, "arity"))
    if arity < 1:
        raise line.error("arity must be at least 1", pos=arity_pos)
    kind, origin = Kind.PRINCIPAL, SOURCE
    while not line.at_end():
        if line.accept("@"):
            origin = line.regex(_IDENT, "purpose tag")
        else:
            word_pos = line.pos
            word = line.regex(_IDENT, "'side' or '@tag'")
            if word != "side":
                raise line.error(f"unknown relation marker '{word}'", pos=word_pos)
            kind = Kind.SIDE
    return Relation(name, arity, kind, origin)


def _strip_comment(raw: str) -> str:
    idx = raw.find("#")
    return raw if idx < 0 else raw[:idx]


# =========================
# Public API
# =========================

def parse_program(text: Union[str, bytes]) -> Program:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProgramSyntaxError(f"input is not valid UTF-8 ({e.reason})", 1, 1) from None

    lines = [(_Line(_strip_comment(raw), no)) for no, raw in enumerate(text.split("\n"), start=1)]

    # 1) declarations first, so that use may precede declaration
    relations: Dict[str, Relation] = {}
    ordered: List[Relation] = []
    bodies: List[Tuple[str, _Line]] = []
    for line in lines:
        if line.at_end():
            continue
        keyword = line.regex(_IDENT, "keyword")
        if keyword == "rel":
            start = line.pos
            rel = _declaration(line)
            if rel.name in relations:
                raise line.error(f"relation {rel.name} declared twice", pos=start)
            relations[rel.name] = rel
            ordered.append(rel)
        elif keyword in ("tgd", "fact", "query"):
            bodies.append((keyword, line))
        else:
            raise line.error(f"unknown statement '{keyword}'", pos=0)

    # 2) statements
    tgds: List[TGD] = []
    facts: List[Atom] = []
    queries: List[ConjunctiveQuery] = []
    for keyword, line in bodies:
        if keyword == "tgd":
            body = _atom_list(line, relations, _rule_term, "->")
            if not body:
                raise line.error("rule body is empty", EmptyRuleError)
            line.expect("->")
            head = _atom_list(line, relations, _rule_term, None)
            if not head:
                raise line.error("rule head is empty", EmptyRuleError)
            tgds.append(TGD(body, head))
        elif keyword == "fact":
            if line.at_end():
                raise line.error("fact is empty", EmptyRuleError)
            facts.append(_atom(line, relations, _fact_term))
        else:
            atoms = _atom_list(line, relations, _rule_term, None)
            if not atoms:
                raise line.error("query is empty", EmptyRuleError)
            queries.append(ConjunctiveQuery(atoms))
        if not line.at_end():
            raise line.error(f"unexpected '{line.text[line.pos]}'")

    return Program(Signature(tuple(ordered)), tuple(tgds), Instance(frozenset(facts)), tuple(queries))


def parse_file(path) -> Program:
    with open(path, "rb") as fh:
        return parse_program(fh.read())
