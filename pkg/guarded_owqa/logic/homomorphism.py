# -*- coding: utf-8 -*-
# guarded_owqa/logic/homomorphism.py
from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .model import Atom, Term, Value, Variable

Substitution = Dict[Variable, Term]


class FactIndex:
    """
    Insertion-ordered fact store.
    Lookups by relation and by (relation, position, value); iteration order is
    insertion order, which fixes the enumeration order of homomorphisms.
    """

    def __init__(self, facts: Iterable[Atom] = ()):
        self._facts: Dict[Atom, None] = {}
        self._by_rel: Dict[str, List[Atom]] = {}
        self._by_pos: Dict[Tuple[str, int, Term], List[Atom]] = {}
        self._by_value: Dict[Value, List[Atom]] = {}
        for fact in facts:
            self.add(fact)

    def add(self, fact: Atom) -> bool:
        if fact in self._facts:
            return False
        self._facts[fact] = None
        self._by_rel.setdefault(fact.relation, []).append(fact)
        for pos, value in enumerate(fact.args):
            self._by_pos.setdefault((fact.relation, pos, value), []).append(fact)
        for value in fact.values:
            self._by_value.setdefault(value, []).append(fact)
        return True

    def update(self, facts: Iterable[Atom]) -> List[Atom]:
        return [f for f in facts if self.add(f)]

    def __contains__(self, fact: object) -> bool:
        return fact in self._facts

    def __len__(self) -> int:
        return len(self._facts)

    def __iter__(self) -> Iterator[Atom]:
        return iter(list(self._facts))

    def with_relation(self, relation: str) -> Sequence[Atom]:
        return self._by_rel.get(relation, ())

    def with_value(self, value: Value) -> Sequence[Atom]:
        return self._by_value.get(value, ())

    def freeze(self) -> frozenset:
        return frozenset(self._facts)

    def candidates(self, pattern: Atom, subst: Mapping[Variable, Term]) -> Sequence[Atom]:
        best: Optional[Sequence[Atom]] = None
        ground = True
        for pos, term in enumerate(pattern.args):
            value = subst.get(term) if isinstance(term, Variable) else term
            if value is None:
                ground = False
                continue
            bucket = self._by_pos.get((pattern.relation, pos, value), ())
            if best is None or len(bucket) < len(best):
                best = bucket
            if not bucket:
                return ()
        if ground:
            fact = pattern.substitute(subst)
            return (fact,) if fact in self._facts else ()
        if best is None:
            return self.with_relation(pattern.relation)
        return best


# =========================
# Matching
# =========================

def match_atom(pattern: Atom, fact: Atom, subst: Mapping[Variable, Term]) -> Optional[Dict[Variable, Term]]:
    """Extend subst so that pattern maps onto fact; None if impossible."""
    if pattern.relation != fact.relation or len(pattern.args) != len(fact.args):
        return None
    out = subst
    copied = False
    for p, v in zip(pattern.args, fact.args):
        if isinstance(p, Variable):
            bound = out.get(p)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[p] = v
            elif bound != v:
                return None
        elif p != v:
            return None
    return dict(out) if not copied else out


def _as_index(target) -> FactIndex:
    if isinstance(target, FactIndex):
        return target
    if isinstance(target, (set, frozenset)):
        return FactIndex(sorted(target, key=Atom.sort_key))
    return FactIndex(target)


def find_homomorphisms(
    pattern: Sequence[Atom],
    target,
    seed: Optional[Mapping[Variable, Term]] = None,
) -> Iterator[Substitution]:
    """
    Yield every substitution extending seed that maps each pattern atom into target.
    Order: pattern atoms left to right, candidate facts in target order
    (sets are sorted first so the order does not depend on hashing).
    """
    index = _as_index(target)
    atoms = tuple(pattern)

    def extend(i: int, subst: Dict[Variable, Term]) -> Iterator[Substitution]:
        if i == len(atoms):
            yield dict(subst)
            return
        atom = atoms[i]
        for fact in index.candidates(atom, subst):
            nxt = match_atom(atom, fact, subst)
            if nxt is not None:
                yield from extend(i + 1, nxt)

    yield from extend(0, dict(seed or {}))


def find_homomorphism(pattern: Sequence[Atom], target, seed=None) -> Optional[Substitution]:
    return next(find_homomorphisms(pattern, target, seed), None)


def compose(first: Mapping[Variable, Term], then: Mapping[Term, Term]) -> Dict[Variable, Term]:
    """then ∘ first."""
    return {k: then.get(v, v) for k, v in first.items()}
