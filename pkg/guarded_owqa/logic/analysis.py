# -*- coding: utf-8 -*-
# guarded_owqa/logic/analysis.py
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Optional, Tuple, Union

from .model import Atom, Signature, SignatureStats, TGD


@dataclass(frozen=True)
class RuleMetrics:
    width: int
    breadth: Union[int, float]
    is_guarded: bool
    obeys_side: bool
    principal_guard_count: int


def principal_guard_indices(rule: TGD, side: AbstractSet[str]) -> Tuple[int, ...]:
    return tuple(i for i in rule.guard_indices if rule.body[i].relation not in side)


def principal_guard_index(rule: TGD, side: AbstractSet[str]) -> Optional[int]:
    found = principal_guard_indices(rule, side)
    return found[0] if found else None


def breadth_for_guard(rule: TGD, guard: int) -> int:
    touched = {v for i, a in enumerate(rule.body) if i != guard for v in a.variables}
    return len(touched)


def obeys_side(rule: TGD, side: AbstractSet[str]) -> bool:
    for g in rule.guard_indices:
        if all(a.relation in side for i, a in enumerate(rule.body) if i != g):
            return True
    return False


def analyze_rule(rule: TGD, side: AbstractSet[str]) -> RuleMetrics:
    principal = principal_guard_indices(rule, side)
    breadth: Union[int, float] = (
        min(breadth_for_guard(rule, g) for g in principal) if principal else math.inf
    )
    return RuleMetrics(
        width=rule.width,
        breadth=breadth,
        is_guarded=rule.is_guarded,
        obeys_side=obeys_side(rule, side),
        principal_guard_count=len(principal),
    )


def is_isomorphic(left: Atom, right: Atom) -> bool:
    return left.pattern == right.pattern


def signature_stats(signature: Signature, rules: Iterable[TGD]) -> SignatureStats:
    """a is floored at 2, the standing assumption of the size bounds."""
    arities = [r.arity for r in signature]
    side_arities = [r.arity for r in signature if r.is_side]
    a = max([2] + arities)
    a_prime = max([0] + side_arities)
    w = max([0] + [r.width for r in rules])
    return SignatureStats(a=a, a_prime=a_prime, n_prime=len(side_arities), w=w, w_prime=max(a_prime, w))
