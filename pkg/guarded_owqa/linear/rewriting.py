# -*- coding: utf-8 -*-
# guarded_owqa/linear/rewriting.py
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from ..exceptions import CapExceededError
from ..logic.model import Atom, ConjunctiveQuery, Constant, TGD, Term, Variable, term_key

logger = logging.getLogger(__name__)

Disjunct = Tuple[Atom, ...]


@dataclass(frozen=True)
class UnionOfCQs:
    disjuncts: Tuple[ConjunctiveQuery, ...]
    # first disjunct accepted by the stop test, if any
    matched: Optional[ConjunctiveQuery] = None

    def __len__(self) -> int:
        return len(self.disjuncts)


# =========================
# Unification
# =========================

class _Unifier:
    def __init__(self) -> None:
        self.parent: Dict[Term, Term] = {}

    def find(self, t: Term) -> Term:
        root = t
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(t, t) != root:
            self.parent[t], t = root, self.parent[t]
        return root

    def union(self, a: Term, b: Term) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        if isinstance(ra, Constant) and isinstance(rb, Constant):
            return False
        if isinstance(rb, Constant) or (not isinstance(ra, Constant) and term_key(rb) < term_key(ra)):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def unify(self, left: Atom, right: Atom) -> bool:
        if left.relation != right.relation or len(left.args) != len(right.args):
            return False
        return all(self.union(a, b) for a, b in zip(left.args, right.args))

    def apply(self, atom: Atom) -> Atom:
        return Atom(atom.relation, tuple(self.find(t) for t in atom.args))

    def members(self, t: Term, terms: Sequence[Term]) -> List[Term]:
        root = self.find(t)
        return [u for u in terms if self.find(u) == root]


def canonical_disjunct(atoms: Sequence[Atom]) -> Disjunct:
    """Variables renamed v0, v1, ... by first occurrence over atoms sorted by shape."""
    order = sorted(set(atoms), key=lambda a: (a.relation, a.pattern[1], tuple(term_key(t) for t in a.args if isinstance(t, Constant))))
    ren: Dict[Term, Variable] = {}
    for atom in order:
        for t in atom.args:
            if isinstance(t, Variable) and t not in ren:
                ren[t] = Variable(f"v{len(ren)}")
    return tuple(sorted({a.substitute(ren) for a in atoms}, key=Atom.sort_key))


def _rename_apart(rule: TGD, tag: int) -> TGD:
    ren = {v: Variable(f"_r{tag}_{v.name}") for v in rule.body_variables + rule.existential}
    return rule.substitute(ren)


# =========================
# Steps
# =========================

def resolve(disjunct: Disjunct, i: int, rule: TGD) -> Optional[Disjunct]:
    """Replace disjunct[i] by the body of rule; None if the head does not apply."""
    atom = disjunct[i]
    u = _Unifier()
    if not u.unify(atom, rule.head[0]):
        return None
    elsewhere = {v for j, a in enumerate(disjunct) if j != i for v in a.variables}
    terms = list(dict.fromkeys(list(atom.args) + list(rule.head[0].args) + list(rule.body_variables)))
    frontier = set(rule.body_variables)
    existential = set(rule.existential)
    for z in rule.existential:
        for t in u.members(z, terms):
            if t == z:
                continue
            if isinstance(t, Constant) or t in frontier or t in existential or t in elsewhere:
                return None
    rest = [u.apply(a) for j, a in enumerate(disjunct) if j != i]
    return tuple(dict.fromkeys(rest + [u.apply(b) for b in rule.body]))


def factorize(disjunct: Disjunct, i: int, j: int) -> Optional[Disjunct]:
    u = _Unifier()
    if not u.unify(disjunct[i], disjunct[j]):
        return None
    return tuple(dict.fromkeys(u.apply(a) for a in disjunct))


# =========================
# Public API
# =========================

def ucq_rewrite(
    query: ConjunctiveQuery,
    rules: Sequence[TGD],
    cap: int = 20000,
    stop: Optional[Callable[[ConjunctiveQuery], bool]] = None,
) -> UnionOfCQs:
    """
    Breadth-first rewriting of query under single-headed linear rules.
    Disjuncts are deduplicated after canonical renaming; more than cap
    disjuncts raises CapExceededError. stop, when given, is tried on every
    disjunct as it is generated and ends the search on the first success.
    """
    by_head: Dict[str, List[TGD]] = {}
    existential_heads: Set[str] = set()
    for tag, rule in enumerate(rules):
        renamed = _rename_apart(rule, tag)
        by_head.setdefault(rule.head[0].relation, []).append(renamed)
        if rule.existential:
            existential_heads.add(rule.head[0].relation)

    start = canonical_disjunct(query.atoms)
    seen: Dict[Disjunct, None] = {start: None}
    queue: Deque[Disjunct] = deque([start])
    if stop is not None and stop(ConjunctiveQuery(start)):
        return UnionOfCQs((ConjunctiveQuery(start),), ConjunctiveQuery(start))

    def successors(d: Disjunct) -> Iterator[Disjunct]:
        for i, atom in enumerate(d):
            for rule in by_head.get(atom.relation, ()):
                out = resolve(d, i, rule)
                if out is not None:
                    yield out
        for i in range(len(d)):
            if d[i].relation not in existential_heads:
                continue
            for j in range(i + 1, len(d)):
                if d[j].relation == d[i].relation:
                    out = factorize(d, i, j)
                    if out is not None:
                        yield out

    while queue:
        current = queue.popleft()
        for nxt in successors(current):
            key = canonical_disjunct(nxt)
            if key in seen:
                continue
            if len(seen) >= cap:
                logger.warning({"stage": "rewrite", "cap": cap})
                raise CapExceededError(cap)
            seen[key] = None
            queue.append(key)
            if stop is not None and stop(ConjunctiveQuery(key)):
                return UnionOfCQs(tuple(ConjunctiveQuery(d) for d in seen), ConjunctiveQuery(key))
    return UnionOfCQs(tuple(ConjunctiveQuery(d) for d in seen))
