# -*- coding: utf-8 -*-
# guarded_owqa/chase/proof.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import AbstractSet, Dict, List, Mapping, Optional, Set

from ..logic.canonical import freeze_atoms
from ..logic.model import Atom, Instance, Null, Program, TGD, Term, Variable
from .model import CHASE, PROPAGATION, RELAXED, SATURATION, ChaseRun, Strategy
from .oracle import QueryLike, bounded_entailment_oracle, query_atoms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProofCheck:
    ok: bool
    failed_step: int = -1
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


_OK = ProofCheck(True)


def _fail(step: int, reason: str) -> ProofCheck:
    return ProofCheck(False, step, reason)


# =========================
# Helpers
# =========================

def _guarded_in(facts: AbstractSet[Atom], values: AbstractSet) -> bool:
    return not values or any(values <= f.values for f in facts)


def _nulls(atoms) -> Set[Null]:
    return {t for a in atoms for t in a.args if isinstance(t, Null)}


class _LemmaVerifier:
    def __init__(self, program: Program, budget: int):
        self.program = program
        self.budget = budget
        self._seen: Dict[TGD, bool] = {}

    def __call__(self, rule: TGD) -> bool:
        if rule not in self._seen:
            self._seen[rule] = self._verify(rule)
        return self._seen[rule]

    def _verify(self, rule: TGD) -> bool:
        if not rule.is_full:
            return False
        body, ren = freeze_atoms(rule.body)
        heads = [a.substitute(ren) for a in rule.head]
        frozen = self.program.with_instance(Instance(frozenset(body)))
        verdict = bounded_entailment_oracle(frozen, heads, self.budget)
        if not verdict.entailed:
            logger.warning({"stage": "check_proof", "lemma": str(rule), "verdict": verdict.verdict.value})
        return verdict.entailed


# =========================
# Public API
# =========================

def check_proof(
    program: Program,
    run: ChaseRun,
    match: Optional[Mapping[Variable, Term]],
    query: QueryLike,
    verify_lemmas: bool = True,
    lemma_budget: int = 500,
) -> ProofCheck:
    """
    Replay run against program and check that match maps query into the final tree.
    Step indices in the result are 0-based; failed_step == len(run.steps) means
    the replay succeeded but the match does not hold.
    """
    program_rules = set(program.tgds)
    lemma_from = run.lemma_from if run.lemma_from >= 0 else len(run.rules)
    verifier = _LemmaVerifier(program, lemma_budget)
    side = program.signature.side_names
    side_only = run.strategy is Strategy.PRINCIPAL_EXEMPT

    if not run.initial <= program.instance.facts:
        return _fail(-1, "initial facts are not part of the program instance")

    def rule_for(step_no: int, rule_id: int):
        if not 0 <= rule_id < len(run.rules):
            return None, f"unknown rule id {rule_id}"
        rule = run.rules[rule_id]
        if rule_id < lemma_from:
            if rule not in program_rules:
                return None, f"rule {rule_id} is not a program rule"
        elif not verify_lemmas:
            pass
        elif not verifier(rule):
            return None, f"lemma {rule} is not entailed"
        return rule, ""

    nodes: List[Set[Atom]] = [set(run.initial)]
    used: Set[Null] = _nulls(run.initial)

    for i, step in enumerate(run.steps):
        if not 0 <= step.node < len(nodes):
            return _fail(i, f"unknown node {step.node}")
        here = nodes[step.node]

        if step.kind == PROPAGATION:
            if not 0 <= step.target < len(nodes):
                return _fail(i, f"unknown target node {step.target}")
            there = nodes[step.target]
            for fact in step.facts:
                if fact not in here:
                    return _fail(i, f"{fact} is not in node {step.node}")
                if side_only and fact.relation not in side:
                    return _fail(i, f"{fact} is principal and cannot be propagated")
                if not _guarded_in(there, fact.values):
                    return _fail(i, f"{fact} is not guarded in node {step.target}")
            there.update(step.facts)
            continue

        if step.kind == SATURATION:
            for d in step.derivations:
                rule, why = rule_for(i, d.rule_id)
                if rule is None:
                    return _fail(i, why)
                if not rule.is_full:
                    return _fail(i, f"saturation uses non-full rule {d.rule_id}")
                trig = dict(d.trigger)
                if set(trig) != set(rule.body_variables):
                    return _fail(i, f"trigger of rule {d.rule_id} does not bind its body")
                if any(a.substitute(trig) not in here for a in rule.body):
                    return _fail(i, f"trigger of rule {d.rule_id} does not map into node {step.node}")
                if d.fact not in {a.substitute(trig) for a in rule.head}:
                    return _fail(i, f"{d.fact} is not a head image of rule {d.rule_id}")
                here.add(d.fact)
            continue

        if step.kind not in (CHASE, RELAXED):
            return _fail(i, f"unknown step kind {step.kind}")
        rule, why = rule_for(i, step.rule_id)
        if rule is None:
            return _fail(i, why)
        trig = dict(step.trigger)
        if set(trig) != set(rule.body_variables):
            return _fail(i, "trigger does not bind exactly the body variables")
        if any(a.substitute(trig) not in here for a in rule.body):
            return _fail(i, f"trigger does not map the body into node {step.node}")
        fresh = dict(step.fresh)
        if set(fresh) != set(rule.existential):
            return _fail(i, "fresh binding does not match the existential variables")
        fresh_values = list(fresh.values())
        if len(set(fresh_values)) != len(fresh_values) or any(
            not isinstance(v, Null) or v in used for v in fresh_values
        ):
            return _fail(i, "existential values are not fresh nulls")
        full = dict(trig)
        full.update(fresh)
        head = tuple(a.substitute(full) for a in rule.head)
        if tuple(step.facts) != head:
            return _fail(i, "recorded facts differ from the head image")
        used.update(fresh_values)

        creates_child = step.kind == RELAXED or not rule.is_full
        if step.kind == RELAXED and not rule.is_full:
            return _fail(i, "relaxed step on a non-full rule")
        if not creates_child:
            if step.target != step.node:
                return _fail(i, "full chase step must stay in its node")
            here.update(head)
            continue
        if step.target != len(nodes):
            return _fail(i, f"new node id {step.target} is out of sequence")
        head_values = frozenset(v for a in head for v in a.values)
        for fact in step.inherited:
            if fact not in here:
                return _fail(i, f"inherited {fact} is not in node {step.node}")
            if not fact.values <= head_values:
                return _fail(i, f"inherited {fact} is not guarded by the new node")
            if side_only and fact.relation not in side:
                return _fail(i, f"inherited {fact} is principal")
        nodes.append(set(head) | set(step.inherited))

    union: Set[Atom] = set().union(*nodes)
    atoms = query_atoms(query)
    if match is None:
        return _fail(len(run.steps), "no match")
    match = dict(match)
    if any(v not in match for a in atoms for v in a.variables):
        return _fail(len(run.steps), "match does not bind every query variable")
    for atom in atoms:
        if atom.substitute(match) not in union:
            return _fail(len(run.steps), f"{atom.substitute(match)} is not in the final tree")
    return _OK


# =========================
# Strategy discipline
# =========================

def _parents(run: ChaseRun) -> Dict[int, Optional[int]]:
    return {n.id: n.parent for n in run.nodes}


def _subtree(parents: Mapping[int, Optional[int]], root: int) -> Set[int]:
    out = {root}
    changed = True
    while changed:
        changed = False
        for node, parent in parents.items():
            if parent in out and node not in out:
                out.add(node)
                changed = True
    return out


def check_one_pass_discipline(run: ChaseRun) -> ProofCheck:
    """Every step acts on the recently updated node; a subtree left towards its parent stays closed."""
    parents = _parents(run)
    closed: Set[int] = set()
    current = 0
    for i, step in enumerate(run.steps):
        if step.node != current:
            return _fail(i, f"step acts on node {step.node}, recently updated is {current}")
        if step.node in closed or step.target in closed:
            return _fail(i, f"step revisits closed node {step.node}")
        nxt = step.recently_updated
        if parents.get(current) == nxt:
            closed |= _subtree(parents, current)
        current = nxt
    return _OK


def check_shortcut_discipline(run: ChaseRun) -> ProofCheck:
    phases: Dict[int, int] = {}
    for i, step in enumerate(run.steps):
        if step.kind == PROPAGATION:
            return _fail(i, "shortcut runs never propagate")
        if step.kind == SATURATION:
            phases[step.target] = phases.get(step.target, 0) + 1
            if phases[step.target] > 1:
                return _fail(i, f"second saturation phase on node {step.target}")
    for node in run.nodes:
        if phases.get(node.id, 0) != 1 and not run.exhausted:
            return _fail(-1, f"node {node.id} has {phases.get(node.id, 0)} saturation phases")
    return _OK


def check_principal_exempt_nodes(run: ChaseRun, side: AbstractSet[str]) -> ProofCheck:
    for node in run.nodes:
        if node.parent is None:
            continue
        principal = [f for f in node.facts if f.relation not in side]
        if len(principal) != 1:
            return _fail(-1, f"node {node.id} holds {len(principal)} principal facts")
    return _OK
