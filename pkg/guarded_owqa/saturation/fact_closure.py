# -*- coding: utf-8 -*-
# guarded_owqa/saturation/fact_closure.py
from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Set, Tuple

from ..chase.engine import ChaseTree, RuleBook, triggers
from ..chase.model import ChaseRun, Strategy
from ..exceptions import BoundViolationError
from ..logic.canonical import ChildishType, canonical_mapping
from ..logic.model import Atom, Instance, RuleSet, SignatureStats, Value
from .saturate import SaturationSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChildLabel:
    fact: Atom
    rule_id: int
    inherited: Tuple[Atom, ...]


@dataclass(frozen=True)
class FactClosureResult:
    instance: Instance
    added: FrozenSet[Atom]
    children: Dict[int, ChildLabel] = field(default_factory=dict)
    # truncated chase from the input instance, kept when record=True
    run: Optional[ChaseRun] = None

    @property
    def saturated_instance(self) -> Instance:
        return self.instance


def child_bound(stats: SignatureStats, sigma_size: int, domain_size: int) -> int:
    w = stats.w_prime
    return (
        max(1, domain_size) ** w
        * sigma_size
        * (stats.a + 1) ** w
        * 2 ** (stats.n_prime * w ** stats.a_prime)
    )


def _side_facts_over(tree: ChaseTree, values: Set[Value], side: Set[str]) -> list:
    found: Dict[Atom, None] = {}
    for v in values:
        for f in tree.facts(0).with_value(v):
            if f.relation in side and f.values <= values:
                found[f] = None
    return list(found)


def grow_fact_closure(tree: ChaseTree, sigma: RuleSet, closure: SaturationSet) -> Dict[int, ChildLabel]:
    """
    One-level truncated chase: saturate the root, then for every trigger of a
    non-full rule of sigma build the child (head fact plus the side facts over
    its exported values), saturate it and copy its null-free facts to the root.
    Repeat until the root stops growing.
    """
    side = set(sigma.side)
    domain = frozenset(v for f in tree.facts(0) for v in f.values)
    spawning = [(rid, r) for rid, r in enumerate(sigma.rules) if not r.is_full]
    seen: Set[Tuple[ChildishType, Tuple[Tuple[int, Value], ...]]] = set()
    children: Dict[int, ChildLabel] = {}
    bound = child_bound(sigma.stats, len(sigma), len(domain))

    grew = True
    while grew:
        before = len(tree.facts(0))
        tree.saturate_node(0, closure)
        for rid, rule in spawning:
            for subst in list(triggers(rule, tree.facts(0))):
                exported = {subst[v] for v in rule.exported}
                head = rule.head[0].substitute(subst)
                inherited = _side_facts_over(tree, exported, side)
                label_type, ren = canonical_mapping(head, inherited)
                label = (label_type, tuple(sorted((ren[v].index, v) for v in exported)))
                if label in seen:
                    continue
                seen.add(label)
                if len(seen) > bound:
                    logger.error({"title": "fact closure bound", "message": f"{len(seen)} children > {bound}"})
                    raise BoundViolationError(f"fact closure spawned {len(seen)} children, bound is {bound}")
                child = tree.create_child(0, rule, subst, side_only=side)
                children[child] = ChildLabel(tree.steps[-1].facts[0], rid, tree.steps[-1].inherited)
                tree.saturate_node(child, closure)
                back = sorted(
                    (f for f in tree.facts(child) if f.values <= domain and f not in tree.facts(0)),
                    key=Atom.sort_key,
                )
                if back:
                    tree.propagate(child, 0, back, recent=0)
        grew = len(tree.facts(0)) > before
    return children


def fact_saturate(
    sigma: RuleSet,
    closure: SaturationSet,
    instance: Instance,
    record: bool = False,
) -> FactClosureResult:
    """Fact-saturated superset of instance; record=True keeps the truncated chase as a run."""
    started = time.monotonic()
    tree = ChaseTree(instance.facts, RuleBook(sigma.rules), budget=sys.maxsize)
    children = grow_fact_closure(tree, sigma, closure)
    root = tree.facts(0).freeze()
    added = root - instance.facts
    run = tree.freeze(Strategy.TREE, False) if record else None
    logger.info({
        "stage": "fact_saturate",
        "facts": len(instance),
        "added": len(added),
        "children": len(children),
        "elapsed_ms": round((time.monotonic() - started) * 1000, 3),
    })
    return FactClosureResult(Instance(root), frozenset(added), children, run)


def is_fact_saturated(sigma: RuleSet, closure: SaturationSet, instance: Instance) -> bool:
    return not fact_saturate(sigma, closure, instance).added


def entails_fact(sigma: RuleSet, closure: SaturationSet, instance: Instance, fact: Atom) -> bool:
    """Ground fact entailment over the active domain of instance."""
    if fact in instance:
        return True
    if not fact.values <= instance.active_domain:
        return False
    return fact in fact_saturate(sigma, closure, instance).instance
