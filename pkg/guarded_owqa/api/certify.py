# -*- coding: utf-8 -*-
# guarded_owqa/api/certify.py
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Any, Dict, Optional

from ..chase.engine import BudgetExhausted, ChaseTree, RuleBook, run_shortcut
from ..chase.model import ChaseRun, Strategy, run_to_records, term_doc
from ..chase.proof import check_proof
from ..config import PipelineConfig
from ..exceptions import CertificationFailureError
from ..linear.decide import LinearDecision, program_depth_bound
from ..linear.linearizer import LIFT, LinearProgram
from ..linear.tight_chase import TightChaseResult, tight_chase
from ..logic.homomorphism import find_homomorphism
from ..logic.model import ConjunctiveQuery, Program, Term, Variable
from ..saturation.fact_closure import grow_fact_closure
from ..saturation.saturate import SaturationSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    run: ChaseRun
    match: Dict[Variable, Term]
    # "replay" when the linear witness was enough, "search" after the fallback
    method: str = "replay"

    def as_document(self) -> Dict[str, Any]:
        doc = run_to_records(self.run)
        doc["match"] = [[var.name, term_doc(val)] for var, val in sorted(self.match.items(), key=lambda kv: kv[0].name)]
        doc["method"] = self.method
        return doc


# =========================
# Helpers
# =========================

def _witness(query: ConjunctiveQuery, lin: LinearProgram, decision: LinearDecision, config: PipelineConfig) -> Optional[TightChaseResult]:
    if decision.witness is not None and decision.witness.entailed:
        return decision.witness
    depth = config.chase_depth or program_depth_bound(query, lin)
    found = tight_chase(query.atoms, lin.tgds, lin.instance, depth, config.chase_node_cap)
    return found if found.entailed else None


def _replay(tree: ChaseTree, program: Program, closure: SaturationSet, lin: LinearProgram, witness: TightChaseResult, query: ConjunctiveQuery) -> bool:
    """
    Fire, on the Σ side, the non-full rule behind every lift step the linear match
    depends on. Linear nulls are mapped to the nulls of the replayed nodes.
    """
    sigma = program.ruleset
    node_map: Dict[int, int] = {}
    value_map: Dict[Term, Term] = {}
    for i in witness.support(query.atoms):
        node = witness.nodes[i]
        if node.parent < 0:
            node_map[i] = 0
            continue
        parent = node_map.get(node.parent)
        if parent is None:
            return False
        made = lin.rules[node.rule_index]
        if made.kind != LIFT:
            node_map[i] = parent
            continue
        lin_trigger = dict(node.trigger)
        delta = sigma.rules[made.rule_id]
        theta = {}
        for var, body_var in made.trigger:
            value = lin_trigger[body_var]
            theta[var] = value_map.get(value, value)
        if any(a.substitute(theta) not in tree.facts(parent) for a in delta.body):
            logger.debug({"stage": "certify", "replay": "body missing", "rule": str(delta)})
            return False
        child = tree.create_child(parent, delta, theta)
        head = tree.steps[-1].facts[0]
        for lin_value, value in zip(node.fact.args, head.args):
            value_map.setdefault(lin_value, value)
        tree.saturate_node(child, closure)
        node_map[i] = child
    return True


def _match(tree: ChaseTree, query: ConjunctiveQuery):
    return find_homomorphism(query.atoms, tree.all)


# =========================
# Public API
# =========================

def certify(
    program: Program,
    closure: SaturationSet,
    query: ConjunctiveQuery,
    lin: LinearProgram,
    decision: LinearDecision,
    config: PipelineConfig,
) -> Certificate:
    """
    Build and check a chase proof of query over the normalized program.
    1) recorded fact closure from the input instance
    2) replay of the linear witness' lift steps
    3) otherwise breadth-first shortcut search within the oracle budget
    Raises CertificationFailureError when no checked proof is found.
    """
    tree = ChaseTree(program.instance.facts, RuleBook(program.tgds), budget=sys.maxsize)
    grow_fact_closure(tree, program.ruleset, closure)
    method = "replay"
    match = _match(tree, query)

    if match is None:
        witness = _witness(query, lin, decision, config)
        if witness is not None:
            _replay(tree, program, closure, lin, witness, query)
            match = _match(tree, query)

    if match is None:
        method = "search"
        tree.budget = len(tree.steps) + config.oracle_budget
        try:
            run_shortcut(
                tree, program.tgds, closure,
                stop_when=lambda t: _match(t, query) is not None,
                start=list(range(len(tree.nodes))),
            )
        except BudgetExhausted:
            pass
        match = _match(tree, query)

    if match is None:
        logger.error({"title": "certification", "message": f"no proof found for {query}"})
        raise CertificationFailureError(f"no chase proof found for {query}")

    run = tree.freeze(Strategy.TREE, False)
    checked = check_proof(program, run, match, query, verify_lemmas=True, lemma_budget=config.lemma_budget)
    if not checked:
        logger.error({"title": "certification", "message": f"step {checked.failed_step}: {checked.reason}"})
        raise CertificationFailureError(f"proof check failed at step {checked.failed_step}: {checked.reason}")
    logger.info({"stage": "certify", "method": method, "steps": len(run.steps), "nodes": len(run.nodes)})
    return Certificate(run, dict(match), method)
