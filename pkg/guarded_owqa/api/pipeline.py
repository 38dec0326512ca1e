# -*- coding: utf-8 -*-
# guarded_owqa/api/pipeline.py
from __future__ import annotations

import importlib
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from .. import hooks
from ..chase.oracle import bounded_entailment_oracle
from ..config import PipelineConfig, get_settings
from ..dsl.report import QueryResult, Report
from ..dsl.render import render_query
from ..exceptions import ModeDisagreementError
from ..linear.linearizer import LinearProgram
from ..logic.model import Atom, ConjunctiveQuery, Instance, Program
from ..preprocess.normalize import NormalizationTrace
from ..saturation.fact_closure import FactClosureResult
from ..saturation.saturate import SaturationSet, suitable_count_bound
from .certify import Certificate, certify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Answer:
    query: ConjunctiveQuery
    value: bool
    certificate: Optional[Certificate] = None
    disjuncts: int = 0
    max_depth: int = 0


@dataclass
class Prepared:
    """Everything the stages compute before a query is looked at."""

    source: Program
    normalized: Program
    trace: NormalizationTrace
    closure: SaturationSet
    facts: FactClosureResult
    lin: LinearProgram
    timings_ms: Dict[str, float] = field(default_factory=dict)


# =========================
# Helpers
# =========================

def get_attr(dotted: str) -> Callable[..., Any]:
    module, _, name = dotted.rpartition(".")
    return getattr(importlib.import_module(module), name)


def _stage(name: str) -> Callable[..., Any]:
    return get_attr(hooks.pipeline_stages[name])


class _Clock:
    def __init__(self, sink: Dict[str, float]):
        self.sink = sink

    def run(self, name: str, fn: Callable[..., Any], *args, **kwargs):
        started = time.monotonic()
        try:
            return fn(*args, **kwargs)
        finally:
            self.sink[name] = self.sink.get(name, 0.0) + (time.monotonic() - started) * 1000


# =========================
# Public API
# =========================

def prepare(
    program: Program,
    saturation_hook: Optional[Callable[[SaturationSet], None]] = None,
) -> Prepared:
    """normalize → saturate → fact_saturate → linearize."""
    timings: Dict[str, float] = {}
    clock = _Clock(timings)
    normalized, trace = clock.run("normalize", _stage("normalize"), program)
    sigma = normalized.ruleset
    closure = clock.run("saturate", _stage("saturate"), sigma)
    if saturation_hook is not None:
        saturation_hook(closure)
    facts = clock.run("fact_saturate", _stage("fact_saturate"), sigma, closure, normalized.instance)
    lin = clock.run("linearize", _stage("linearize"), sigma, closure, facts.instance)
    return Prepared(program, normalized, trace, closure, facts, lin, timings)


def answer(
    program: Program,
    config: Optional[PipelineConfig] = None,
    saturation_hook: Optional[Callable[[SaturationSet], None]] = None,
    prepared: Optional[Prepared] = None,
) -> Tuple[List[Answer], Report]:
    """
    Answer every query of program; certify positive answers when config.certify.
    prepared: stages already computed for this program (saturation_hook is then ignored).
    """
    config = config or get_settings()
    prepared = prepared or prepare(program, saturation_hook)
    clock = _Clock(prepared.timings_ms)
    decide = _stage("decide")
    verdicts: Dict[str, int] = {}
    answers: List[Answer] = []

    for source_query, query in zip(program.queries, prepared.normalized.queries):
        decision = clock.run(
            "decide", decide, query, prepared.lin,
            mode=config.engine, cap=config.rewrite_cap,
            node_cap=config.chase_node_cap, depth=config.chase_depth,
        )
        certificate = None
        if decision.answer and config.certify:
            certificate = clock.run(
                "certify", certify,
                prepared.normalized, prepared.closure, query, prepared.lin, decision, config,
            )
        if config.cross_check:
            verdict = clock.run("oracle", bounded_entailment_oracle, prepared.normalized, query, config.oracle_budget)
            verdicts[verdict.verdict.value] = verdicts.get(verdict.verdict.value, 0) + 1
            if verdict.entailed and not decision.answer:
                logger.error({"title": "oracle disagreement", "message": f"oracle entails {render_query(source_query)}"})
                raise ModeDisagreementError(f"oracle entails {render_query(source_query)} but the pipeline answered false")
        answers.append(Answer(source_query, decision.answer, certificate, decision.disjuncts, decision.max_depth))

    report = Report(
        answers=[
            QueryResult(
                query=render_query(a.query)[len("query "):],
                answer=a.value,
                disjuncts=a.disjuncts,
                max_depth=a.max_depth,
                certificate=a.certificate.as_document() if a.certificate else None,
            )
            for a in answers
        ],
        statistics=statistics(prepared, verdicts),
        timings_ms=dict(prepared.timings_ms),
    )
    logger.info({"stage": "answer", "queries": len(answers), "yes": sum(a.value for a in answers)})
    return answers, report


def statistics(prepared: Prepared, verdicts: Optional[Dict[str, int]] = None) -> Dict[str, Any]:
    sigma = prepared.normalized.ruleset
    return {
        "ruleCountIn": len(prepared.source.tgds),
        "saturatedCount": len(prepared.closure),
        "suitableBound": suitable_count_bound(sigma.stats, len(sigma)),
        "childishTypeCount": len(prepared.lin.catalog),
        "linearRuleCount": len(prepared.lin.rules),
        "oracleVerdicts": dict(sorted((verdicts or {}).items())),
    }


def entailed_facts(program: Program) -> Instance:
    """Facts over the input domain and the input relations entailed by program."""
    normalized, _ = _stage("normalize")(program)
    sigma = normalized.ruleset
    closure = _stage("saturate")(sigma)
    result = _stage("fact_saturate")(sigma, closure, normalized.instance)
    source = {r.name for r in program.signature}
    return Instance(frozenset(f for f in result.instance.facts if f.relation in source))


def entails_fact(program: Program, fact: Atom) -> bool:
    return fact in entailed_facts(program)
