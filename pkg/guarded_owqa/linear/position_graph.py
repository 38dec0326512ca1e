# -*- coding: utf-8 -*-
# guarded_owqa/linear/position_graph.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from ..exceptions import NotDecomposableError
from ..logic.model import TGD

# (relation, 1-based argument index)
Position = Tuple[str, int]


class PositionGraph:
    """Basic position graph: body position of an exported variable → head position of it."""

    def __init__(self, rules: Iterable[TGD] = ()):
        self.graph = nx.DiGraph()
        for rule in rules:
            self.add_rule(rule)

    def add_rule(self, rule: TGD) -> None:
        exported = set(rule.exported)
        for body in rule.body:
            for i, var in enumerate(body.args):
                if var not in exported:
                    continue
                for head in rule.head:
                    for j, other in enumerate(head.args):
                        if other == var:
                            self.graph.add_edge((body.relation, i + 1), (head.relation, j + 1))

    @property
    def edges(self) -> Set[Tuple[Position, Position]]:
        return set(self.graph.edges)

    def find_cycle(self) -> Optional[List[Position]]:
        """One cycle as a node list starting at its smallest position, or None."""
        try:
            cycle = nx.find_cycle(self.graph)
        except nx.NetworkXNoCycle:
            return None
        nodes = [u for u, _ in cycle]
        start = nodes.index(min(nodes))
        return nodes[start:] + nodes[:start]

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph)


def position_edges(rules: Iterable[TGD]) -> Set[Tuple[Position, Position]]:
    """Brute force over (rule, variable, body position, head position)."""
    out: Set[Tuple[Position, Position]] = set()
    for rule in rules:
        for var in rule.exported:
            for body in rule.body:
                for i, t in enumerate(body.args):
                    for head in rule.head:
                        for j, u in enumerate(head.args):
                            if t == var and u == var:
                                out.add(((body.relation, i + 1), (head.relation, j + 1)))
    return out


@dataclass(frozen=True)
class SemiWidthDecomposition:
    sigma1: Tuple[TGD, ...]
    sigma2: Tuple[TGD, ...]
    w: int


def semi_width(rules: Sequence[TGD], target_w: int) -> SemiWidthDecomposition:
    """Width-bounded rules go to sigma1; the rest must have an acyclic position graph."""
    sigma1 = tuple(r for r in rules if r.width <= target_w)
    sigma2 = tuple(r for r in rules if r.width > target_w)
    cycle = PositionGraph(sigma2).find_cycle()
    if cycle:
        raise NotDecomposableError(cycle)
    return SemiWidthDecomposition(sigma1, sigma2, target_w)
