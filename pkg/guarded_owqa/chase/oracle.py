# -*- coding: utf-8 -*-
# guarded_owqa/chase/oracle.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Union

from ..logic.homomorphism import find_homomorphism
from ..logic.model import Atom, ConjunctiveQuery, Program, Term, Variable
from .engine import ChaseTree, run_chase
from .model import ChaseRun, Strategy

logger = logging.getLogger(__name__)

QueryLike = Union[ConjunctiveQuery, Sequence[Atom]]


class Verdict(str, Enum):
    ENTAILED = "ENTAILED"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class OracleVerdict:
    verdict: Verdict
    run: ChaseRun
    match: Optional[Dict[Variable, Term]] = None
    # set when no chase can ever produce a match (a query relation is underivable)
    certain_no: bool = False

    @property
    def entailed(self) -> bool:
        return self.verdict is Verdict.ENTAILED


def query_atoms(query: QueryLike) -> tuple:
    return tuple(query.atoms) if isinstance(query, ConjunctiveQuery) else tuple(query)


def underivable_relations(program: Program, atoms: Sequence[Atom]) -> set:
    present = {f.relation for f in program.instance.facts}
    present |= {h.relation for r in program.tgds for h in r.head}
    return {a.relation for a in atoms if a.relation not in present}


def bounded_entailment_oracle(program: Program, query: QueryLike, budget: int = 2000) -> OracleVerdict:
    """
    Sound, possibly incomplete: TREE chase for at most budget steps, testing the
    query against the union of all node facts before the run and after each round.
    A query over a relation no rule or fact produces is answered without chasing.
    """
    atoms = query_atoms(query)
    missing = underivable_relations(program, atoms)
    if missing:
        logger.debug({"stage": "oracle", "verdict": "UNKNOWN", "underivable": sorted(missing)})
        run = run_chase(program, Strategy.TREE, budget=budget, stop_when=lambda tree: True)
        return OracleVerdict(Verdict.UNKNOWN, run, None, certain_no=True)

    found: Dict[str, Dict[Variable, Term]] = {}

    def matched(tree: ChaseTree) -> bool:
        m = find_homomorphism(atoms, tree.all)
        if m is not None:
            found["match"] = m
        return m is not None

    run = run_chase(program, Strategy.TREE, budget=budget, stop_when=matched)
    if "match" not in found:
        # last round may end on the budget before the round-end check
        m = find_homomorphism(atoms, run.all_facts())
        if m is not None:
            found["match"] = m
    if "match" in found:
        return OracleVerdict(Verdict.ENTAILED, run, found["match"])
    if run.exhausted:
        logger.warning({"stage": "oracle", "verdict": "UNKNOWN", "budget": budget, "steps": len(run.steps)})
    # a terminated tree chase is a universal model
    return OracleVerdict(Verdict.UNKNOWN, run, None, certain_no=not run.exhausted)
