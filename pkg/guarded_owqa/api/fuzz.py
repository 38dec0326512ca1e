# -*- coding: utf-8 -*-
# guarded_owqa/api/fuzz.py
from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from ..chase.oracle import bounded_entailment_oracle
from ..config import PipelineConfig, get_settings
from ..dsl.render import render_query
from ..exceptions import GuardedOwqaError
from ..logic.model import (
    Atom,
    ConjunctiveQuery,
    Constant,
    Instance,
    Kind,
    Program,
    Relation,
    Signature,
    TGD,
    Variable,
)
from ..saturation.saturate import SaturationSet
from .pipeline import answer

logger = logging.getLogger(__name__)

CONSTANTS = ("a", "b", "c", "d")


# =========================
# Program generator
# =========================

def generate_program(rng: random.Random, config: PipelineConfig) -> Program:
    """
    Random guarded program obeying its side signature by construction:
    guards are principal, side atoms only use guard variables, heads use at
    most max_width body variables.
    """
    n_rel = rng.randint(1, config.max_relations)
    n_side = 0
    if config.side_arity > 0 and n_rel > 1:
        n_side = rng.randint(0, min(2, n_rel - 1))
    principal = [Relation(f"P{i + 1}", rng.randint(1, config.max_arity)) for i in range(n_rel - n_side)]
    side = [Relation(f"S{i + 1}", rng.randint(1, config.side_arity), Kind.SIDE) for i in range(n_side)]
    relations = principal + side

    rules = [_random_rule(rng, config, principal, side) for _ in range(rng.randint(0, config.max_rules))]

    facts = set()
    for _ in range(rng.randint(1, config.max_facts)):
        rel = rng.choice(relations)
        facts.add(Atom(rel.name, tuple(Constant(rng.choice(CONSTANTS)) for _ in range(rel.arity))))

    queries = []
    for _ in range(rng.randint(1, 2)):
        pool = [Variable(f"y{i + 1}") for i in range(3)]
        atoms = []
        for _ in range(rng.randint(1, config.max_query_atoms)):
            rel = rng.choice(relations)
            atoms.append(Atom(rel.name, tuple(rng.choice(pool) for _ in range(rel.arity))))
        queries.append(ConjunctiveQuery(tuple(dict.fromkeys(atoms))))

    return Program(Signature(tuple(relations)), tuple(rules), Instance(frozenset(facts)), tuple(queries))


def _random_rule(rng: random.Random, config: PipelineConfig, principal: Sequence[Relation], side: Sequence[Relation]) -> TGD:
    guard_rel = rng.choice(principal)
    names = [Variable(f"x{i + 1}") for i in range(guard_rel.arity)]
    args = [v if rng.random() > 0.2 else rng.choice(names) for v in names]
    guard = Atom(guard_rel.name, tuple(args))
    body_vars = list(dict.fromkeys(args))
    body = [guard]
    for _ in range(rng.randint(0, 2) if side else 0):
        rel = rng.choice(side)
        body.append(Atom(rel.name, tuple(rng.choice(body_vars) for _ in range(rel.arity))))

    width = rng.randint(0, min(config.max_width, len(body_vars)))
    exported = rng.sample(body_vars, width)
    if side and exported and rng.random() < 0.35:
        rel = rng.choice(side)
        head = Atom(rel.name, tuple(rng.choice(exported) for _ in range(rel.arity)))
    else:
        rel = rng.choice(principal)
        fresh = [Variable(f"z{i + 1}") for i in range(rel.arity)]
        pool = exported + fresh[: rng.randint(0 if exported else 1, rel.arity)]
        head = Atom(rel.name, tuple(rng.choice(pool) for _ in range(rel.arity)))
    return TGD(tuple(dict.fromkeys(body)), (head,))


# =========================
# Differential test
# =========================

@dataclass(frozen=True)
class CaseOutcome:
    index: int
    seed: int
    failures: Tuple[str, ...] = ()
    unresolved: Tuple[str, ...] = ()
    entailed: int = 0
    certified: int = 0


@dataclass
class FuzzReport:
    cases: int = 0
    failures: List[CaseOutcome] = field(default_factory=list)
    unresolved: List[CaseOutcome] = field(default_factory=list)
    entailed: int = 0
    certified: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {
            "cases": self.cases,
            "failures": [
                {"index": c.index, "seed": c.seed, "messages": list(c.failures)} for c in self.failures
            ],
            "unresolved": [
                {"index": c.index, "seed": c.seed, "queries": list(c.unresolved)} for c in self.unresolved
            ],
            "entailed": self.entailed,
            "certified": self.certified,
        }


def case_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def run_case(
    index: int,
    config: PipelineConfig,
    program: Optional[Program] = None,
    saturation_hook: Optional[Callable[[SaturationSet], None]] = None,
) -> CaseOutcome:
    """
    Pipeline against the bounded oracle on one program.
    oracle ENTAILED and pipeline false → failure; pipeline true must certify;
    oracle UNKNOWN and pipeline false → unresolved.
    """
    seed = case_seed(config.seed, index)
    if program is None:
        program = generate_program(random.Random(seed), config)
    failures: List[str] = []
    unresolved: List[str] = []
    entailed = certified = 0
    try:
        answers, _ = answer(program, config.with_overrides(certify=True, cross_check=False), saturation_hook)
    except GuardedOwqaError as e:
        return CaseOutcome(index, seed, (f"{type(e).__name__}: {e}",))

    for ans in answers:
        text = render_query(ans.query)
        verdict = bounded_entailment_oracle(program, ans.query, config.oracle_budget)
        if verdict.entailed:
            entailed += 1
            if not ans.value:
                failures.append(f"oracle entails, pipeline says no: {text}")
        elif not ans.value and not verdict.certain_no:
            unresolved.append(text)
        if ans.value and ans.certificate is not None:
            certified += 1
    for text in unresolved:
        logger.warning({"stage": "fuzz", "unresolved": text, "case": index, "seed": seed})
    return CaseOutcome(index, seed, tuple(failures), tuple(unresolved), entailed, certified)


def _case_args(config: PipelineConfig, programs, hook):
    if programs is None:
        return [(i, config, None, hook) for i in range(config.cases)]
    return [(i, config, p, hook) for i, p in enumerate(programs)]


def _star_case(args) -> CaseOutcome:
    return run_case(*args)


def differential_test(
    config: Optional[PipelineConfig] = None,
    programs: Optional[Sequence[Program]] = None,
    saturation_hook: Optional[Callable[[SaturationSet], None]] = None,
) -> FuzzReport:
    """Run config.cases generated programs (or the given ones) through run_case."""
    config = config or get_settings()
    jobs = _case_args(config, programs, saturation_hook)
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_star_case, jobs))
    else:
        outcomes = [_star_case(job) for job in jobs]

    report = FuzzReport(cases=len(outcomes))
    for outcome in sorted(outcomes, key=lambda o: o.index):
        if outcome.failures:
            report.failures.append(outcome)
        if outcome.unresolved:
            report.unresolved.append(outcome)
        report.entailed += outcome.entailed
        report.certified += outcome.certified
    logger.info({
        "stage": "fuzz",
        "cases": report.cases,
        "failures": len(report.failures),
        "unresolved": len(report.unresolved),
        "certified": report.certified,
    })
    return report
