# -*- coding: utf-8 -*-
# guarded_owqa/saturation/saturate.py
from __future__ import annotations

import itertools
import logging
import random
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from ..chase.fullrules import FullRuleSet, guard_first
from ..exceptions import BoundViolationError
from ..logic.analysis import breadth_for_guard, principal_guard_indices
from ..logic.canonical import ChildishType, canonical_mapping, element_variables
from ..logic.homomorphism import FactIndex, find_homomorphisms
from ..logic.model import Atom, Null, RuleSet, SignatureStats, TGD, Term, Variable

logger = logging.getLogger(__name__)

BodyKey = ChildishType
OnDerive = Callable[[TGD, Dict[Variable, Term], Atom], None]

# inference provenance of a closure head
FROM_SIGMA = "sigma"
FROM_TRANSITIVITY = "transitivity"
FROM_PRINCIPAL = "principal+transitivity"


@dataclass(frozen=True)
class SuitabilityWitness:
    is_full: bool
    single_head: bool
    principal_guard_count: int
    compatible_guard: int
    # -1: no compatible head; -2: the head is a side atom
    compatible_head: int
    breadth: float
    width: int
    w: int

    @property
    def ok(self) -> bool:
        return (
            self.is_full
            and self.single_head
            and self.principal_guard_count == 1
            and self.compatible_guard >= 0
            and self.compatible_head != -1
            and self.breadth <= self.w
            and self.width <= self.w
        )


@dataclass(frozen=True)
class SuitableRule:
    rule: TGD
    body_key: BodyKey
    origin: str


def is_suitable(rule: TGD, sigma: RuleSet) -> Tuple[bool, SuitabilityWitness]:
    side = sigma.side
    w = sigma.stats.w_prime
    guards = principal_guard_indices(rule, side)
    guard_ok = -1
    breadth = float("inf")
    if len(guards) == 1:
        g = guards[0]
        breadth = breadth_for_guard(rule, g)
        guard_ok = _principal_head_rule(sigma, rule.body[g])
    head_ok = -1
    if len(rule.head) == 1:
        head = rule.head[0]
        head_ok = -2 if head.relation in side else _principal_head_rule(sigma, head)
    witness = SuitabilityWitness(
        is_full=rule.is_full,
        single_head=len(rule.head) == 1,
        principal_guard_count=len(guards),
        compatible_guard=guard_ok,
        compatible_head=head_ok,
        breadth=breadth,
        width=rule.width,
        w=w,
    )
    return witness.ok, witness


def _principal_head_rule(sigma: RuleSet, atom: Atom) -> int:
    rid = sigma.head_patterns.get(atom.pattern, -1)
    if rid >= 0 and sigma.signature.is_side(atom.relation):
        return -1
    return rid


def suitable_count_bound(stats: SignatureStats, sigma_size: int) -> int:
    """|Σ|² · (a+1)^(3w) · 2^(n′·w^a′)"""
    w = stats.w_prime
    return sigma_size ** 2 * (stats.a + 1) ** (3 * w) * 2 ** (stats.n_prime * w ** stats.a_prime)


# =========================
# Trivial rules
# =========================

def _side_atoms_over(sigma: RuleSet, elements: Sequence[Null]) -> List[Atom]:
    out = []
    for rel in sigma.signature:
        if rel.is_side:
            for args in itertools.product(elements, repeat=rel.arity):
                out.append(Atom(rel.name, tuple(args)))
    return out


def _subsets(items: Sequence, size: int) -> Iterator[Tuple]:
    for k in range(size + 1):
        yield from itertools.combinations(items, k)


def trivial_bodies(sigma: RuleSet) -> Iterator[BodyKey]:
    w = sigma.stats.w_prime
    seen: Set[BodyKey] = set()
    for pattern in sigma.head_patterns:
        rel, shape = pattern
        if sigma.signature.is_side(rel):
            continue
        principal = Atom(rel, tuple(Null(i + 1) for i in shape))
        elements = tuple(dict.fromkeys(principal.args))
        for chosen in _subsets(elements, min(w, len(elements))):
            candidates = _side_atoms_over(sigma, chosen)
            for picked in _subsets(candidates, len(candidates)):
                if chosen and {v for a in picked for v in a.args} != set(chosen):
                    continue
                key = canonical_mapping(principal, picked)[0]
                if key not in seen:
                    seen.add(key)
                    yield key


def enumerate_trivial_rules(sigma: RuleSet) -> Iterator[TGD]:
    """Σ_triv, lazily: A ∧ sides → A for every Σ head type A."""
    for key in trivial_bodies(sigma):
        body = key.as_tgd_body()
        yield TGD(body, (body[0],))


# =========================
# Saturation
# =========================

class SaturationSet:
    """
    The closure of Σ, keyed by canonical body.
    Bodies are solved on demand: each body's heads are the least set closed under
    full Σ rules, the heads of the bodies it contains around a Σ-compatible guard,
    and the consequences of the children its non-full principal rules create.
    """

    def __init__(self, sigma: RuleSet):
        self.sigma = sigma
        self.stats = sigma.stats
        self.w = self.stats.w_prime
        self.side = sigma.side
        self._full = FullRuleSet(sigma.rules)
        self._principal = [
            r for r in sigma.rules
            if not r.is_full and len(r.head) == 1 and r.head[0].relation not in self.side
        ]
        self._bodies: Dict[BodyKey, Dict[Atom, str]] = {}
        self._dependents: Dict[BodyKey, Set[BodyKey]] = {}
        self._queue: Deque[BodyKey] = deque()
        self._queued: Set[BodyKey] = set()
        self.computations = 0

    # ---- bookkeeping ----

    def __len__(self) -> int:
        return sum(1 + len(h) for h in self._bodies.values())

    def __contains__(self, key: object) -> bool:
        return key in self._bodies

    @property
    def bodies(self) -> Tuple[BodyKey, ...]:
        return tuple(self._bodies)

    def heads(self, key: BodyKey) -> Tuple[Atom, ...]:
        return tuple(self._bodies.get(key, ()))

    def provenance(self, key: BodyKey, head: Atom) -> str:
        return self._bodies[key][head]

    def assume(self, key: BodyKey, head: Atom, origin: str = "assumed") -> None:
        """Add a head to a body without inference, e.g. lemmas imported from elsewhere."""
        self.demand(key)
        self._bodies[key][head] = origin
        for dep in self._dependents.get(key, ()):
            self._enqueue(dep)

    def _enqueue(self, key: BodyKey) -> None:
        if key not in self._queued:
            self._queued.add(key)
            self._queue.append(key)

    def demand(self, key: BodyKey, dependent: Optional[BodyKey] = None) -> Tuple[Atom, ...]:
        if key not in self._bodies:
            self._bodies[key] = {}
            self._enqueue(key)
        # a body may read its own heads through a child of the same type
        if dependent is not None:
            self._dependents.setdefault(key, set()).add(dependent)
        return self.heads(key)

    def solve(self) -> None:
        while self._queue:
            key = self._queue.popleft()
            self._queued.discard(key)
            if self._compute(key):
                for dep in sorted(self._dependents.get(key, ()), key=str):
                    self._enqueue(dep)

    def lookup(self, key: BodyKey) -> Tuple[Atom, ...]:
        self.demand(key)
        self.solve()
        return self.heads(key)

    # ---- one body ----

    def _suitable_head(self, fact: Atom) -> bool:
        if len(fact.values) > self.w:
            return False
        if fact.relation in self.side:
            return True
        return _principal_head_rule(self.sigma, fact) >= 0

    def _guard_ok(self, fact: Atom) -> bool:
        return fact.relation not in self.side and _principal_head_rule(self.sigma, fact) >= 0

    def _compute(self, key: BodyKey) -> bool:
        self.computations += 1
        heads = self._bodies[key]
        facts = FactIndex(sorted(key.facts, key=Atom.sort_key))
        facts.update(heads)
        derived: Dict[Atom, str] = {}

        def keep(fact: Atom, origin: str) -> None:
            if facts.add(fact):
                derived[fact] = origin

        changed = True
        while changed:
            before = len(facts)
            # 1) full rules of Σ
            for fact in self._full.fire(facts):
                derived.setdefault(fact, FROM_SIGMA)
            # 2) bodies around each Σ-compatible guard
            for guard in [f for f in facts if self._guard_ok(f)]:
                for sub, inverse in self._sub_bodies(guard, facts):
                    if sub == key:
                        continue
                    for head in self.demand(sub, key):
                        keep(head.substitute(inverse), FROM_TRANSITIVITY)
            # 3) children created by non-full principal rules
            for rule in self._principal:
                for subst in list(find_homomorphisms(guard_first(rule), facts)):
                    for fact in self._child_consequences(key, rule, subst, facts):
                        keep(fact, FROM_PRINCIPAL)
            changed = len(facts) != before

        grew = False
        for fact, origin in derived.items():
            if fact not in key.facts and fact not in heads and self._suitable_head(fact):
                heads[fact] = origin
                grew = True
        return grew

    def _sub_bodies(self, guard: Atom, facts: FactIndex) -> Iterator[Tuple[BodyKey, Dict[Term, Term]]]:
        elements = tuple(dict.fromkeys(guard.args))
        size = min(self.w, len(elements))
        for chosen in itertools.combinations(elements, size):
            allowed = set(chosen)
            sides = self._side_facts_over(facts, allowed)
            sub, ren = canonical_mapping(guard, sides)
            yield sub, {n: v for v, n in ren.items()}

    def _side_facts_over(self, facts: FactIndex, allowed: Set) -> List[Atom]:
        found: Dict[Atom, None] = {}
        for v in allowed:
            for f in facts.with_value(v):
                if f.relation in self.side and f.values <= allowed:
                    found[f] = None
        return list(found)

    def _child_consequences(self, key: BodyKey, rule: TGD, subst: Dict[Variable, Term], facts: FactIndex) -> List[Atom]:
        offset = max((n.index for n in key.elements), default=0) + 1
        full = dict(subst)
        for i, z in enumerate(rule.existential):
            full[z] = Null(offset + i)
        child = rule.head[0].substitute(full)
        exported = {subst[v] for v in rule.exported}
        sides = self._side_facts_over(facts, exported)
        sub, ren = canonical_mapping(child, sides)
        inverse = {n: v for v, n in ren.items()}
        out = []
        for head in self.demand(sub, key):
            fact = head.substitute(inverse)
            if fact.values <= exported:
                out.append(fact)
        return out

    # ---- rules view ----

    def lemma_rule(self, key: BodyKey, head: Atom) -> TGD:
        ren = element_variables(key.elements)
        return TGD(key.as_tgd_body(), (head.substitute(ren),))

    def suitable_rules(self, include_trivial: bool = True) -> List[SuitableRule]:
        out: List[SuitableRule] = []
        for key, heads in self._bodies.items():
            if include_trivial:
                out.append(SuitableRule(self.lemma_rule(key, key.principal), key, "trivial"))
            for head, origin in heads.items():
                out.append(SuitableRule(self.lemma_rule(key, head), key, origin))
        return out

    def as_rules(self) -> Tuple[TGD, ...]:
        """Non-trivial closure rules as full TGDs over x1..xk."""
        return tuple(r.rule for r in self.suitable_rules(include_trivial=False))

    # ---- application ----

    def apply(self, index: FactIndex, on_derive: Optional[OnDerive] = None) -> List[Atom]:
        """
        Extend index to its fixpoint under the full rules of Σ and the closure
        rules anchored at every Σ-compatible principal fact; returns the new facts.
        """
        added: List[Atom] = []
        done: Set[Tuple[BodyKey, Tuple[Tuple[Term, Term], ...]]] = set()
        while True:
            new = self._full.fire(index, on_derive)
            added.extend(new)
            for guard in [f for f in index if self._guard_ok(f)]:
                for sub, inverse in self._sub_bodies(guard, index):
                    mark = (sub, tuple(sorted(inverse.items(), key=lambda kv: kv[0].index)))
                    if mark in done:
                        continue
                    done.add(mark)
                    trigger = {var: inverse[n] for n, var in element_variables(sub.elements).items()}
                    for head in self.lookup(sub):
                        fact = head.substitute(inverse)
                        if index.add(fact):
                            new.append(fact)
                            added.append(fact)
                            if on_derive is not None:
                                on_derive(self.lemma_rule(sub, head), trigger, fact)
            if not new:
                return added


# =========================
# Public API
# =========================

def seed_bodies(sigma: RuleSet) -> List[BodyKey]:
    """Bare head types plus the bodies of suitable full rules of Σ."""
    seeds: Dict[BodyKey, None] = {}
    for pattern in sigma.head_patterns:
        rel, shape = pattern
        if not sigma.signature.is_side(rel):
            seeds[canonical_mapping(Atom(rel, tuple(Null(i + 1) for i in shape)))[0]] = None
    for rule in sigma.rules:
        ok, witness = is_suitable(rule, sigma)
        if not ok:
            continue
        g = principal_guard_indices(rule, sigma.side)[0]
        others = [a for i, a in enumerate(rule.body) if i != g]
        seeds[canonical_mapping(rule.body[g], others)[0]] = None
    return list(seeds)


def saturate(
    sigma: RuleSet,
    seeds: Optional[Sequence[BodyKey]] = None,
    order_seed: Optional[int] = None,
    exhaustive: bool = False,
) -> SaturationSet:
    """
    Compute the closure of sigma (strongly obeying its side signature).
    exhaustive: also solve every trivial body, not only the demanded ones.
    order_seed: shuffle the initial worklist; the result does not depend on it.
    """
    started = time.monotonic()
    closure = SaturationSet(sigma)
    keys = list(seeds) if seeds is not None else seed_bodies(sigma)
    if exhaustive:
        keys.extend(trivial_bodies(sigma))
    if order_seed is not None:
        random.Random(order_seed).shuffle(keys)
    for key in keys:
        closure.demand(key)
    closure.solve()

    bound = suitable_count_bound(sigma.stats, len(sigma))
    if len(closure) > bound:
        logger.error({"title": "saturation bound", "message": f"{len(closure)} rules > bound {bound}"})
        raise BoundViolationError(f"closure has {len(closure)} rules, bound is {bound}")
    logger.info({
        "stage": "saturate",
        "bodies": len(closure.bodies),
        "closure_size": len(closure),
        "bound": bound,
        "elapsed_ms": round((time.monotonic() - started) * 1000, 3),
    })
    return closure
