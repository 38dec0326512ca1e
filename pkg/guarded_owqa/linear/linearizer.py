# -*- coding: utf-8 -*-
# guarded_owqa/linear/linearizer.py
from __future__ import annotations

import itertools
import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from ..chase.fullrules import guard_first
from ..exceptions import BoundViolationError, NotDecomposableError
from ..logic.canonical import ChildishType, canonical_mapping, element_variables, rule_key
from ..logic.homomorphism import FactIndex, find_homomorphisms
from ..logic.model import (
    TAG_LIN,
    Atom,
    Instance,
    Null,
    Relation,
    RuleSet,
    Signature,
    TGD,
    Term,
    Variable,
)
from ..saturation.saturate import SaturationSet, trivial_bodies
from .position_graph import PositionGraph

logger = logging.getLogger(__name__)

INSTANTIATE = "instantiate"
LIFT = "lift"


@dataclass(frozen=True)
class LinearRule:
    """
    A linear rule plus what it was made from.
    For lift rules, trigger maps the variables of the source non-full rule to
    the body variables x1..xk of the linear rule.
    """

    rule: TGD
    kind: str
    source: ChildishType
    endo: Tuple[Tuple[Null, Null], ...] = ()
    rule_id: int = -1
    trigger: Tuple[Tuple[Variable, Term], ...] = ()


class ChildishCatalog:
    """Canonical types and their generated relations lin_<R>_<n>."""

    def __init__(self, taken: Iterable[str] = ()):
        self.relation_of: Dict[ChildishType, Relation] = {}
        self.type_of: Dict[str, ChildishType] = {}
        self._taken: Set[str] = set(taken)
        self._counter = 0

    def __len__(self) -> int:
        return len(self.relation_of)

    def __contains__(self, item: object) -> bool:
        return item in self.relation_of

    @property
    def types(self) -> Tuple[ChildishType, ...]:
        return tuple(self.relation_of)

    def register(self, ctype: ChildishType) -> Tuple[Relation, bool]:
        rel = self.relation_of.get(ctype)
        if rel is not None:
            return rel, False
        name = ""
        while not name or name in self._taken:
            self._counter += 1
            name = f"{TAG_LIN}_{ctype.principal.relation}_{self._counter}"
        self._taken.add(name)
        rel = Relation(name, ctype.arity, origin=TAG_LIN)
        self.relation_of[ctype] = rel
        self.type_of[name] = ctype
        return rel, True

    def relations(self) -> Tuple[Relation, ...]:
        return tuple(self.relation_of.values())


@dataclass(frozen=True)
class LinearProgram:
    signature: Signature
    rules: Tuple[LinearRule, ...]
    instance: Instance
    catalog: ChildishCatalog = field(compare=False)
    sigma1: Tuple[TGD, ...] = ()
    sigma2: Tuple[TGD, ...] = ()
    w: int = 0

    @property
    def tgds(self) -> Tuple[TGD, ...]:
        return tuple(r.rule for r in self.rules)

    def provenance(self, rule_index: int) -> LinearRule:
        return self.rules[rule_index]


# =========================
# Helpers
# =========================

def _type_atom(rel: Relation, ctype: ChildishType, endo: Dict[Null, Null]) -> Atom:
    ren = element_variables(ctype.elements)
    return Atom(rel.name, tuple(ren[endo.get(e, e)] for e in ctype.principal.args))


def endomorphisms(ctype: ChildishType) -> Iterator[Dict[Null, Null]]:
    """Every map of the side-carrying elements into themselves (identity elsewhere)."""
    carriers = ctype.side_elements
    for image in itertools.product(carriers, repeat=len(carriers)):
        yield dict(zip(carriers, image))


def _image(ctype: ChildishType, endo: Dict[Null, Null]) -> FactIndex:
    return FactIndex(sorted((f.substitute(endo) for f in ctype.facts), key=Atom.sort_key))


def _expanded(ctype: ChildishType, endo: Dict[Null, Null], closure: SaturationSet) -> FactIndex:
    facts = _image(ctype, endo)
    closure.apply(facts)
    return facts


def _side_facts_over(facts: FactIndex, values: Set, side) -> List[Atom]:
    found: Dict[Atom, None] = {}
    for v in values:
        for f in facts.with_value(v):
            if f.relation in side and f.values <= values:
                found[f] = None
    return list(found)


def root_span(sigma: RuleSet) -> int:
    """Largest number of values a non-full rule reads besides its guard's private ones."""
    span = 0
    for rule in sigma.rules:
        if rule.is_full:
            continue
        touched = set(rule.exported)
        for atom in rule.body:
            if atom.relation in sigma.side:
                touched |= set(atom.variables)
        span = max(span, len(touched))
    return span


# =========================
# Rule emission
# =========================

def instantiate_rules(ctype: ChildishType, closure: SaturationSet, sigma: RuleSet, catalog: ChildishCatalog) -> List[LinearRule]:
    rel, _ = catalog.register(ctype)
    ren = element_variables(ctype.elements)
    out: List[LinearRule] = []
    for endo in endomorphisms(ctype):
        body = _type_atom(rel, ctype, endo)
        expanded = _expanded(ctype, endo, closure)
        for fact in sorted(expanded, key=Atom.sort_key):
            rule = TGD((body,), (fact.substitute(ren),))
            out.append(LinearRule(rule, INSTANTIATE, ctype, tuple(endo.items())))
    return out


def lift_rules(
    ctype: ChildishType,
    sigma: RuleSet,
    closure: SaturationSet,
    catalog: ChildishCatalog,
) -> Tuple[List[LinearRule], List[ChildishType]]:
    """Returns the lift rules of ctype and the types they newly registered."""
    rel, _ = catalog.register(ctype)
    ren = element_variables(ctype.elements)
    offset = len(ctype.elements) + 1
    out: List[LinearRule] = []
    fresh_types: List[ChildishType] = []
    for endo in endomorphisms(ctype):
        body = _type_atom(rel, ctype, endo)
        expanded = _expanded(ctype, endo, closure)
        for rid, delta in enumerate(sigma.rules):
            if delta.is_full:
                continue
            for match in list(find_homomorphisms(guard_first(delta), expanded)):
                full = dict(match)
                for i, z in enumerate(delta.existential):
                    full[z] = Null(offset + i)
                head = delta.head[0].substitute(full)
                exported = {match[v] for v in delta.exported}
                sides = _side_facts_over(expanded, exported, sigma.side)
                child, _ = canonical_mapping(head, sides)
                child_rel, new = catalog.register(child)
                if new:
                    fresh_types.append(child)
                exist_vars = {Null(offset + i): Variable(f"z{i + 1}") for i in range(len(delta.existential))}
                args = tuple(exist_vars.get(a, ren.get(a)) for a in head.args)
                rule = TGD((body,), (Atom(child_rel.name, args),))
                trigger = tuple(sorted(((v, ren[match[v]]) for v in delta.body_variables), key=lambda kv: kv[0].name))
                out.append(LinearRule(rule, LIFT, ctype, tuple(endo.items()), rid, trigger))
    return out, fresh_types


# =========================
# Catalog & instance
# =========================

def instance_types(instance: Instance, sigma: RuleSet, span: int) -> Iterator[Tuple[Atom, ChildishType]]:
    """(fact, type) for every principal fact and every value subset of size at most span."""
    index = FactIndex(instance.sorted_facts())
    for fact in instance.sorted_facts():
        if fact.relation in sigma.side:
            continue
        values = tuple(dict.fromkeys(fact.args))
        for k in range(min(span, len(values)) + 1):
            for chosen in itertools.combinations(values, k):
                sides = _side_facts_over(index, set(chosen), sigma.side)
                yield fact, canonical_mapping(fact, sides)[0]


def enumerate_childish_types(
    sigma: RuleSet,
    closure: SaturationSet,
    seeds: Optional[Sequence[ChildishType]] = None,
    catalog: Optional[ChildishCatalog] = None,
) -> Tuple[ChildishCatalog, List[LinearRule]]:
    """
    Close seeds under lift reachability, emitting the rules of every type on the way.
    Without seeds, start from every Σ head type with side facts on at most w′ elements.
    """
    if catalog is None:
        catalog = ChildishCatalog(r.name for r in sigma.signature)
    start = list(seeds) if seeds is not None else list(trivial_bodies(sigma))
    queue: Deque[ChildishType] = deque()
    done: Set[ChildishType] = set()
    for ctype in start:
        catalog.register(ctype)
        queue.append(ctype)
    rules: List[LinearRule] = []
    keys: Set[tuple] = set()

    def emit(batch: Iterable[LinearRule]) -> None:
        for lr in batch:
            key = rule_key(lr.rule)
            if key not in keys:
                keys.add(key)
                rules.append(lr)

    while queue:
        ctype = queue.popleft()
        if ctype in done:
            continue
        done.add(ctype)
        emit(instantiate_rules(ctype, closure, sigma, catalog))
        lifted, fresh = lift_rules(ctype, sigma, closure, catalog)
        emit(lifted)
        queue.extend(fresh)
    return catalog, rules


def linearize_instance(
    instance: Instance,
    catalog: ChildishCatalog,
    sigma: RuleSet,
    span: Optional[int] = None,
) -> Instance:
    if span is None:
        span = max(sigma.stats.w_prime, root_span(sigma))
    extra = set()
    for fact, ctype in instance_types(instance, sigma, span):
        rel, _ = catalog.register(ctype)
        extra.add(Atom(rel.name, fact.args))
    return instance.union(extra)


def linear_rule_bound(catalog: ChildishCatalog, sigma: RuleSet) -> int:
    a = sigma.stats.a
    homs = max([1] + [len(t.side_elements) ** len(t.side_elements) for t in catalog.types])
    per_type = homs * (len(sigma.signature) * a ** a + len(sigma) * a ** a)
    return len(catalog) * per_type


def linearize(sigma: RuleSet, closure: SaturationSet, instance: Instance) -> LinearProgram:
    """
    Linear program emulating sigma on instance (fact-saturated).
    Seeds are the types of the instance; lift reachability closes the catalog.
    """
    started = time.monotonic()
    w = sigma.stats.w_prime
    span = max(w, root_span(sigma))
    catalog = ChildishCatalog(r.name for r in sigma.signature)
    seeds = list(dict.fromkeys(t for _, t in instance_types(instance, sigma, span)))
    catalog, lin_rules = enumerate_childish_types(sigma, closure, seeds, catalog)
    lin_instance = linearize_instance(instance, catalog, sigma, span)

    bound = linear_rule_bound(catalog, sigma)
    if len(lin_rules) > bound:
        logger.error({"title": "linearization bound", "message": f"{len(lin_rules)} rules > {bound}"})
        raise BoundViolationError(f"linearization emitted {len(lin_rules)} rules, bound is {bound}")

    sigma1 = tuple(lr.rule for lr in lin_rules if lr.kind == LIFT)
    sigma2 = tuple(lr.rule for lr in lin_rules if lr.kind == INSTANTIATE)
    cycle = PositionGraph(sigma2).find_cycle()
    if cycle:
        raise NotDecomposableError(cycle)
    too_wide = [r for r in sigma1 if r.width > w]
    if too_wide:
        raise BoundViolationError(f"lift rule {too_wide[0]} is wider than {w}")

    signature = sigma.signature.extend(catalog.relations())
    logger.info({
        "stage": "linearize",
        "types": len(catalog),
        "rules": len(lin_rules),
        "lift": len(sigma1),
        "instantiate": len(sigma2),
        "facts": len(lin_instance),
        "elapsed_ms": round((time.monotonic() - started) * 1000, 3),
    })
    return LinearProgram(signature, tuple(lin_rules), lin_instance, catalog, sigma1, sigma2, w)
