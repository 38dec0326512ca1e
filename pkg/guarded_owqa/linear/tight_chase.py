# -*- coding: utf-8 -*-
# guarded_owqa/linear/tight_chase.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..logic.homomorphism import FactIndex, find_homomorphism, match_atom
from ..logic.model import Atom, Instance, Null, TGD, Term, Variable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForestNode:
    fact: Atom
    depth: int
    parent: int = -1
    rule_index: int = -1
    trigger: Tuple[Tuple[Variable, Term], ...] = ()


@dataclass(frozen=True)
class TightChaseResult:
    entailed: bool
    # False when the depth bound, the node cap or shape pruning left part of the
    # forest unexplored and no match was found
    complete: bool
    max_depth: int
    pruned: int = 0
    nodes: Tuple[ForestNode, ...] = ()
    match: Optional[Dict[Variable, Term]] = field(default=None, compare=False)

    def node_of(self) -> Dict[Atom, int]:
        return {n.fact: i for i, n in enumerate(self.nodes)}

    def support(self, query: Sequence[Atom]) -> List[int]:
        """Forest nodes the match uses plus their ancestors, ancestors first."""
        if self.match is None:
            return []
        where = self.node_of()
        needed = set()
        for atom in query:
            i = where.get(atom.substitute(self.match), -1)
            while i >= 0 and i not in needed:
                needed.add(i)
                i = self.nodes[i].parent
        return sorted(needed)


def _shape(fact: Atom, parent: Optional[Atom]) -> tuple:
    inherited = ()
    if parent is not None:
        shared = parent.values
        inherited = tuple(i for i, v in enumerate(fact.args) if v in shared)
    return (fact.relation, fact.pattern[1], inherited)


def tight_chase(
    query: Sequence[Atom],
    rules: Sequence[TGD],
    instance: Instance,
    depth_bound: int,
    node_cap: int = 100000,
) -> TightChaseResult:
    """
    Breadth-first chase forest over linear rules, roots = instance facts.
    A node is pruned when its shape (relation, equality pattern, positions shared
    with its parent) already occurs more than |query|+1 times on its root path.
    The query is matched against all facts after every level. A negative answer
    is complete only when nothing was pruned or cut.
    """
    query = tuple(query)
    limit = len(query) + 1
    by_body: Dict[str, List[Tuple[int, TGD]]] = {}
    for idx, rule in enumerate(rules):
        by_body.setdefault(rule.body[0].relation, []).append((idx, rule))

    index = FactIndex()
    nodes: List[ForestNode] = []
    shapes: List[Dict[tuple, int]] = []
    for fact in instance.sorted_facts():
        if index.add(fact):
            nodes.append(ForestNode(fact, 0))
            shapes.append({})
    nulls = [v.index for f in instance.facts for v in f.args if isinstance(v, Null)]
    counter = max(nulls) + 1 if nulls else 0

    def matched() -> Optional[Dict[Variable, Term]]:
        return find_homomorphism(query, index)

    found = matched()
    frontier = list(range(len(nodes)))
    depth = 0
    cut = False
    pruned = 0
    while found is None and frontier:
        if depth >= depth_bound:
            cut = True
            break
        depth += 1
        nxt: List[int] = []
        for node_id in frontier:
            node = nodes[node_id]
            for rule_index, rule in by_body.get(node.fact.relation, ()):
                subst = match_atom(rule.body[0], node.fact, {})
                if subst is None:
                    continue
                if rule.existential:
                    seed = {v: subst[v] for v in rule.exported}
                    if find_homomorphism(rule.head, index, seed) is not None:
                        continue
                    full = dict(subst)
                    for z in rule.existential:
                        full[z] = Null(counter)
                        counter += 1
                else:
                    full = subst
                fact = rule.head[0].substitute(full)
                if fact in index:
                    continue
                shape = _shape(fact, node.fact)
                counts = dict(shapes[node_id])
                counts[shape] = counts.get(shape, 0) + 1
                if counts[shape] > limit:
                    pruned += 1
                    continue
                if len(nodes) >= node_cap:
                    cut = True
                    break
                index.add(fact)
                trigger = tuple(sorted(subst.items(), key=lambda kv: kv[0].name))
                nodes.append(ForestNode(fact, depth, node_id, rule_index, trigger))
                shapes.append(counts)
                nxt.append(len(nodes) - 1)
            if cut:
                break
        if cut:
            break
        found = matched()
        frontier = nxt

    if cut and found is None:
        found = matched()
    result = TightChaseResult(
        entailed=found is not None,
        complete=found is not None or not (cut or pruned),
        max_depth=max((n.depth for n in nodes), default=0),
        pruned=pruned,
        nodes=tuple(nodes),
        match=found,
    )
    if cut and found is None:
        logger.warning({"stage": "tight_chase", "depth_bound": depth_bound, "node_cap": node_cap, "nodes": len(nodes)})
    elif pruned and found is None:
        logger.debug({"stage": "tight_chase", "pruned": pruned, "nodes": len(nodes)})
    return result
