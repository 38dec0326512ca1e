# -*- coding: utf-8 -*-
# guarded_owqa/logic/canonical.py
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from ..exceptions import UnguardedFactError
from .model import Atom, Constant, Null, TGD, Term, Variable


@dataclass(frozen=True)
class ChildishType:
    """
    One principal fact plus side facts, up to isomorphism.
    Elements are Null(1)..Null(k), numbered by first occurrence in the principal
    fact; side facts are kept sorted, so equality is isomorphism.
    """

    principal: Atom
    side: Tuple[Atom, ...] = ()

    def __str__(self) -> str:
        parts = [render_element_atom(self.principal)] + [render_element_atom(a) for a in self.side]
        return "{" + ", ".join(parts) + "}"

    @property
    def arity(self) -> int:
        return self.principal.arity

    @cached_property
    def elements(self) -> Tuple[Null, ...]:
        return tuple(dict.fromkeys(self.principal.args))

    @cached_property
    def side_elements(self) -> Tuple[Null, ...]:
        used = {v for a in self.side for v in a.args}
        return tuple(e for e in self.elements if e in used)

    @cached_property
    def facts(self) -> FrozenSet[Atom]:
        return frozenset((self.principal,) + self.side)

    def as_tgd_body(self) -> Tuple[Atom, ...]:
        """The type as a rule body over variables x1..xk."""
        ren = element_variables(self.elements)
        return tuple(a.substitute(ren) for a in (self.principal,) + self.side)


def render_element_atom(atom: Atom) -> str:
    args = ",".join(str(a.index) if isinstance(a, Null) else str(a) for a in atom.args)
    return f"{atom.relation}({args})"


def element_variables(elements: Iterable[Term]) -> Dict[Term, Variable]:
    return {e: Variable(f"x{e.index}" if isinstance(e, Null) else f"x_{e}") for e in elements}


def canonical_mapping(principal: Atom, side: Iterable[Atom] = ()) -> Tuple[ChildishType, Dict[Term, Null]]:
    """
    Canonical type of principal ∪ side together with the renaming used.
    Works on facts and on atoms over variables alike.
    """
    ren: Dict[Term, Null] = {}
    for arg in principal.args:
        if arg not in ren:
            ren[arg] = Null(len(ren) + 1)
    renamed = set()
    for atom in side:
        missing = [a for a in atom.args if a not in ren]
        if missing:
            raise UnguardedFactError(
                f"{atom} uses {', '.join(map(str, missing))} which is absent from {principal}"
            )
        renamed.add(atom.substitute(ren))
    renamed.discard(principal.substitute(ren))
    ordered = tuple(sorted(renamed, key=_element_key))
    return ChildishType(principal.substitute(ren), ordered), ren


def canonicalize_guarded_set(principal: Atom, side: Iterable[Atom] = ()) -> ChildishType:
    return canonical_mapping(principal, side)[0]


def _element_key(atom: Atom) -> tuple:
    return (atom.relation, tuple(a.index if isinstance(a, Null) else -1 for a in atom.args))


# =========================
# Rules up to renaming
# =========================

def rule_key(rule: TGD) -> tuple:
    """Key equal for rules that differ only by variable names and body atom order."""
    guards = rule.guard_indices
    seed = [rule.body[guards[0]]] if guards else list(rule.body)
    numbering: Dict[Term, int] = {}
    for atom in seed + list(rule.body) + list(rule.head):
        for t in atom.args:
            if isinstance(t, Variable) and t not in numbering:
                numbering[t] = len(numbering)

    def code(atom: Atom) -> tuple:
        return (
            atom.relation,
            tuple(("v", numbering[t]) if isinstance(t, Variable) else ("c", str(t)) for t in atom.args),
        )

    guard_code: Optional[tuple] = code(rule.body[guards[0]]) if guards else None
    body = tuple(sorted({code(a) for a in rule.body}))
    head = tuple(code(a) for a in rule.head)
    return (guard_code, body, head)


def dedupe_atoms(atoms: Iterable[Atom]) -> Tuple[Atom, ...]:
    return tuple(dict.fromkeys(atoms))


def freeze_atoms(atoms: Iterable[Atom], prefix: str = "k_") -> Tuple[Tuple[Atom, ...], Dict[Term, Constant]]:
    """Replace every variable by a fresh constant."""
    atoms = tuple(atoms)
    ren: Dict[Term, Constant] = {}
    for atom in atoms:
        for t in atom.args:
            if isinstance(t, Variable) and t not in ren:
                ren[t] = Constant(f"{prefix}{t.name}")
    return tuple(a.substitute(ren) for a in atoms), ren
