# -*- coding: utf-8 -*-
# guarded_owqa/chase/engine.py
from __future__ import annotations

import logging
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from ..exceptions import IllegalStrategyInputError
from ..logic.homomorphism import FactIndex, find_homomorphism, find_homomorphisms
from ..logic.model import Atom, Null, Program, TGD, Term, Value, Variable
from .fullrules import FullRuleSet, guard_first
from .model import (
    CHASE,
    PROPAGATION,
    RELAXED,
    SATURATION,
    ChaseNode,
    ChaseRun,
    ChaseStepRecord,
    Derivation,
    Strategy,
    binding,
)

logger = logging.getLogger(__name__)


class BudgetExhausted(Exception):
    """Raised inside a run when the step budget is used up."""


class _Node:
    __slots__ = ("id", "parent", "birth", "facts")

    def __init__(self, node_id: int, parent: Optional[int], birth: int):
        self.id = node_id
        self.parent = parent
        self.birth = birth
        self.facts = FactIndex()


class RuleBook:
    """Program rules first; lemma rules are appended the first time they are used."""

    def __init__(self, rules: Sequence[TGD]):
        self.rules: List[TGD] = list(rules)
        self.lemma_from = len(self.rules)
        self._ids: Dict[TGD, int] = {}
        for i, r in enumerate(self.rules):
            self._ids.setdefault(r, i)

    def id_of(self, rule: TGD) -> int:
        rid = self._ids.get(rule)
        if rid is None:
            rid = len(self.rules)
            self.rules.append(rule)
            self._ids[rule] = rid
        return rid


class ChaseTree:
    """Mutable chase tree with a global fact index and step log."""

    def __init__(self, initial: Iterable[Atom], book: RuleBook, budget: int):
        self.nodes: List[_Node] = []
        self.all = FactIndex()
        self.book = book
        self.budget = budget
        self.steps: List[ChaseStepRecord] = []
        self._where: Dict[Atom, Set[int]] = {}
        self._value_nodes: Dict[Value, Set[int]] = {}
        initial = sorted(set(initial), key=Atom.sort_key)
        self.initial = frozenset(initial)
        nulls = [v.index for f in initial for v in f.args if isinstance(v, Null)]
        self.next_null = max(nulls) + 1 if nulls else 0
        root = self.new_node(None, -1)
        for fact in initial:
            self.add(root, fact)

    # ---- structure ----

    def new_node(self, parent: Optional[int], birth: int) -> int:
        node = _Node(len(self.nodes), parent, birth)
        self.nodes.append(node)
        return node.id

    def add(self, node_id: int, fact: Atom) -> bool:
        if not self.nodes[node_id].facts.add(fact):
            return False
        self.all.add(fact)
        self._where.setdefault(fact, set()).add(node_id)
        for v in fact.values:
            self._value_nodes.setdefault(v, set()).add(node_id)
        return True

    def facts(self, node_id: int) -> FactIndex:
        return self.nodes[node_id].facts

    def fresh_null(self) -> Null:
        null = Null(self.next_null)
        self.next_null += 1
        return null

    def guarded(self, node_id: int, fact: Atom) -> bool:
        values = fact.values
        if not values:
            return True
        anchor = next(iter(values))
        return any(values <= g.values for g in self.facts(node_id).with_value(anchor))

    def guarded_facts(self, node_id: int, anchor: Atom, side: Optional[Set[str]] = None) -> List[Atom]:
        values = anchor.values
        found: Dict[Atom, None] = {}
        for v in values:
            for f in self.facts(node_id).with_value(v):
                if f != anchor and f.values <= values and (side is None or f.relation in side):
                    found[f] = None
        return sorted(found, key=Atom.sort_key)

    def nodes_holding(self, values: Iterable[Value]) -> Set[int]:
        out: Optional[Set[int]] = None
        for v in values:
            here = self._value_nodes.get(v, set())
            out = set(here) if out is None else out & here
        return out if out is not None else set(range(len(self.nodes)))

    def descendants(self, node_id: int) -> Set[int]:
        out = {node_id}
        for node in self.nodes[node_id + 1:]:
            if node.parent in out:
                out.add(node.id)
        return out

    # ---- steps ----

    def record(self, step: ChaseStepRecord) -> int:
        if len(self.steps) >= self.budget:
            raise BudgetExhausted()
        self.steps.append(step)
        return len(self.steps) - 1

    def check_budget(self) -> None:
        if len(self.steps) >= self.budget:
            raise BudgetExhausted()

    def fire_full(self, node_id: int, rule: TGD, subst: Dict[Variable, Term], recent: Optional[int] = None) -> List[Atom]:
        facts = tuple(a.substitute(subst) for a in rule.head)
        if all(f in self.all for f in facts):
            return []
        self.check_budget()
        new = [f for f in facts if self.add(node_id, f)]
        self.record(ChaseStepRecord(
            kind=CHASE, node=node_id, target=node_id, rule_id=self.book.id_of(rule),
            trigger=binding(subst), facts=facts,
            recently_updated=node_id if recent is None else recent,
        ))
        return new

    def create_child(
        self,
        node_id: int,
        rule: TGD,
        subst: Dict[Variable, Term],
        side_only: Optional[Set[str]] = None,
        kind: str = CHASE,
    ) -> int:
        self.check_budget()
        fresh = {v: self.fresh_null() for v in rule.existential}
        full = dict(subst)
        full.update(fresh)
        head = tuple(a.substitute(full) for a in rule.head)
        anchor = head[0] if len(head) == 1 else Atom("", tuple(dict.fromkeys(t for h in head for t in h.args)))
        inherited = self.guarded_facts(node_id, anchor, side_only)
        child = self.new_node(node_id, len(self.steps))
        for f in head + tuple(inherited):
            self.add(child, f)
        self.record(ChaseStepRecord(
            kind=kind, node=node_id, target=child, rule_id=self.book.id_of(rule),
            trigger=binding(subst), fresh=binding(fresh), facts=head,
            inherited=tuple(inherited), recently_updated=child,
        ))
        return child

    def propagate(self, source: int, target: int, facts: Sequence[Atom], recent: Optional[int] = None) -> None:
        self.check_budget()
        for f in facts:
            self.add(target, f)
        self.record(ChaseStepRecord(
            kind=PROPAGATION, node=source, target=target, facts=tuple(facts),
            recently_updated=target if recent is None else recent,
        ))

    def saturate_node(self, node_id: int, saturation) -> None:
        self.check_budget()
        derivations: List[Derivation] = []

        def on_derive(rule: TGD, subst: Dict[Variable, Term], fact: Atom) -> None:
            trig = {v: subst[v] for v in rule.body_variables}
            derivations.append(Derivation(self.book.id_of(rule), binding(trig), fact))

        new = saturation.apply(self.facts(node_id), on_derive)
        for f in new:
            self.all.add(f)
            self._where.setdefault(f, set()).add(node_id)
            for v in f.values:
                self._value_nodes.setdefault(v, set()).add(node_id)
        self.record(ChaseStepRecord(
            kind=SATURATION, node=node_id, target=node_id, facts=tuple(new),
            derivations=tuple(derivations), recently_updated=node_id,
        ))

    def freeze(self, strategy: Strategy, exhausted: bool) -> ChaseRun:
        nodes = tuple(
            ChaseNode(n.id, n.facts.freeze(), n.parent, n.birth) for n in self.nodes
        )
        return ChaseRun(
            strategy=strategy,
            initial=self.initial,
            rules=tuple(self.book.rules),
            steps=tuple(self.steps),
            nodes=nodes,
            budget=self.budget,
            exhausted=exhausted,
            lemma_from=self.book.lemma_from,
        )


# =========================
# Helpers
# =========================

def triggers(rule: TGD, index: FactIndex) -> Iterator[Dict[Variable, Term]]:
    return find_homomorphisms(guard_first(rule), index)


def head_satisfied(rule: TGD, subst: Dict[Variable, Term], index: FactIndex) -> bool:
    seed = {v: subst[v] for v in rule.exported}
    return find_homomorphism(rule.head, index, seed) is not None


def _frontier_key(rule_id: int, rule: TGD, subst: Dict[Variable, Term]) -> tuple:
    return (rule_id, tuple(subst[v] for v in rule.exported))


def _require_normalized(program: Program, strategy: Strategy) -> None:
    from ..preprocess.normalize import strong_obedience_violations

    problems = strong_obedience_violations(program.ruleset)
    if problems:
        raise IllegalStrategyInputError(f"{strategy.value} needs a normalized program: {problems[0]}")


# =========================
# Strategies
# =========================

StopWhen = Callable[[ChaseTree], bool]


def _run_tree(tree: ChaseTree, rules: Sequence[TGD], stop_when: Optional[StopWhen]) -> None:
    """
    Rounds over all nodes; a node is rescanned only when its facts changed since
    its last scan, and a trigger is handled at most once. Facts only grow, so a
    skipped trigger (head already present) stays skipped.
    """
    handled: Set[tuple] = set()
    scanned: Dict[int, int] = {}
    progress = True
    while progress:
        progress = False
        for node_id in range(len(tree.nodes)):
            size = len(tree.facts(node_id))
            if scanned.get(node_id) == size:
                continue
            scanned[node_id] = size
            for rule_index, rule in enumerate(rules):
                for subst in list(triggers(rule, tree.facts(node_id))):
                    key = (node_id, rule_index, tuple(subst[v] for v in rule.body_variables))
                    if key in handled:
                        continue
                    handled.add(key)
                    if rule.is_full:
                        new = tree.fire_full(node_id, rule, subst)
                        if not new:
                            continue
                        for fact in new:
                            _propagate_everywhere(tree, node_id, fact)
                    else:
                        if head_satisfied(rule, subst, tree.all):
                            continue
                        tree.create_child(node_id, rule, subst)
                    progress = True
        if stop_when is not None and stop_when(tree):
            return


def _propagate_everywhere(tree: ChaseTree, source: int, fact: Atom) -> None:
    for other in sorted(tree.nodes_holding(fact.values)):
        if other != source and fact not in tree.facts(other) and tree.guarded(other, fact):
            tree.propagate(source, other, [fact], recent=source)


def _run_one_pass(tree: ChaseTree, rules: Sequence[TGD], side: Optional[Set[str]], stop_when: Optional[StopWhen]) -> None:
    """side is None for ONE_PASS; the side signature for PRINCIPAL_EXEMPT."""
    exempt = side is not None
    full = [r for r in rules if r.is_full]
    non_full = [r for r in rules if not r.is_full]
    current = 0
    while True:
        if stop_when is not None and stop_when(tree):
            return
        node = tree.nodes[current]
        # 1) propagation to the parent has priority
        if node.parent is not None:
            parent = node.parent
            pending = [
                f for f in sorted(node.facts, key=Atom.sort_key)
                if f not in tree.facts(parent)
                and (not exempt or f.relation in side)
                and tree.guarded(parent, f)
            ]
            if pending:
                tree.propagate(current, parent, [pending[0]])
                current = parent
                continue
        # 2) one chase step on the recently updated node
        moved = _one_chase_step(tree, current, full, non_full, side)
        if moved is None:
            return
        current = moved


def _one_chase_step(tree: ChaseTree, node_id: int, full, non_full, side) -> Optional[int]:
    index = tree.facts(node_id)
    for rule in full:
        for subst in triggers(rule, index):
            head = rule.head[0].substitute(subst)
            if head in tree.all:
                continue
            if side is not None and head.relation not in side:
                return tree.create_child(node_id, rule, subst, side_only=side, kind=RELAXED)
            tree.fire_full(node_id, rule, subst)
            return node_id
    for rule in non_full:
        for subst in triggers(rule, index):
            if head_satisfied(rule, subst, tree.all):
                continue
            return tree.create_child(node_id, rule, subst, side_only=side)
    return None


def run_shortcut(
    tree: ChaseTree,
    rules: Sequence[TGD],
    saturation,
    side: Optional[Set[str]] = None,
    stop_when: Optional[StopWhen] = None,
    start: Optional[Sequence[int]] = None,
) -> None:
    """
    Breadth-first shortcut firing. Without start the root is saturated first;
    with start the given (already saturated) nodes seed the queue.
    """
    if start is None:
        tree.saturate_node(0, saturation)
        start = [0]
    non_full = [r for r in rules if not r.is_full]
    queue = list(start)
    fired: Set[tuple] = set()
    while queue:
        if stop_when is not None and stop_when(tree):
            return
        node_id = queue.pop(0)
        for rule in non_full:
            rid = tree.book.id_of(rule)
            for subst in list(triggers(rule, tree.facts(node_id))):
                key = (node_id,) + _frontier_key(rid, rule, subst)
                if key in fired or head_satisfied(rule, subst, tree.facts(node_id)):
                    continue
                fired.add(key)
                child = tree.create_child(node_id, rule, subst, side_only=side)
                tree.saturate_node(child, saturation)
                queue.append(child)


# =========================
# Public API
# =========================

def run_chase(
    program: Program,
    strategy: Strategy = Strategy.TREE,
    saturation=None,
    budget: int = 1000,
    stop_when: Optional[StopWhen] = None,
) -> ChaseRun:
    """
    Run one chase variant and return the recorded run.
    saturation: anything with apply(FactIndex, on_derive) (a SaturationSet or a
    FullRuleSet); required by the shortcut strategies.
    """
    strategy = Strategy(strategy)
    side = set(program.signature.side_names)
    if strategy in (Strategy.PRINCIPAL_EXEMPT, Strategy.SHORTCUT, Strategy.SHORTCUT_DONATING):
        _require_normalized(program, strategy)
    if strategy in (Strategy.SHORTCUT, Strategy.SHORTCUT_DONATING) and saturation is None:
        raise IllegalStrategyInputError(f"{strategy.value} needs a saturation")
    if isinstance(saturation, (list, tuple)):
        saturation = FullRuleSet(saturation)

    book = RuleBook(program.tgds)
    tree = ChaseTree(program.instance.facts, book, budget)
    exhausted = False
    try:
        if stop_when is not None and stop_when(tree):
            pass
        elif strategy is Strategy.TREE:
            _run_tree(tree, program.tgds, stop_when)
        elif strategy is Strategy.ONE_PASS:
            _run_one_pass(tree, program.tgds, None, stop_when)
        elif strategy is Strategy.PRINCIPAL_EXEMPT:
            _run_one_pass(tree, program.tgds, side, stop_when)
        else:
            donating = side if strategy is Strategy.SHORTCUT_DONATING else None
            run_shortcut(tree, program.tgds, saturation, donating, stop_when)
    except BudgetExhausted:
        exhausted = True
    run = tree.freeze(strategy, exhausted)
    logger.debug({
        "stage": "chase",
        "strategy": strategy.value,
        "steps": len(run.steps),
        "nodes": len(run.nodes),
        "exhausted": exhausted,
    })
    return run
