# -*- coding: utf-8 -*-
# guarded_owqa/chase/fullrules.py
from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Optional, Tuple

from ..logic.homomorphism import FactIndex, find_homomorphisms
from ..logic.model import Atom, TGD, Term, Variable

OnDerive = Callable[[TGD, Dict[Variable, Term], Atom], None]


def guard_first(rule: TGD) -> Tuple[Atom, ...]:
    """Body with its first guard moved to the front; later atoms are then lookups."""
    if not rule.guard_indices:
        return rule.body
    g = rule.guard_indices[0]
    return (rule.body[g],) + rule.body[:g] + rule.body[g + 1:]


class FullRuleSet:
    """Naive fixpoint of full rules over a fact index."""

    def __init__(self, rules: Iterable[TGD]):
        self.rules = tuple(r for r in rules if r.is_full)
        self._bodies = [guard_first(r) for r in self.rules]

    def __len__(self) -> int:
        return len(self.rules)

    def fire(self, index: FactIndex, on_derive: Optional[OnDerive] = None) -> List[Atom]:
        new: List[Atom] = []
        for rule, body in zip(self.rules, self._bodies):
            for subst in list(find_homomorphisms(body, index)):
                for atom in rule.head:
                    fact = atom.substitute(subst)
                    if index.add(fact):
                        new.append(fact)
                        if on_derive is not None:
                            on_derive(rule, subst, fact)
        return new

    def apply(self, index: FactIndex, on_derive: Optional[OnDerive] = None) -> List[Atom]:
        added: List[Atom] = []
        while True:
            new = self.fire(index, on_derive)
            if not new:
                return added
            added.extend(new)
