# -*- coding: utf-8 -*-
# guarded_owqa/api/bench.py
from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..config import PipelineConfig, get_settings
from ..logic.model import (
    Atom,
    Constant,
    Instance,
    Kind,
    Program,
    Relation,
    Signature,
    TGD,
    Variable,
)
from ..preprocess.normalize import normalize_program
from ..saturation.fact_closure import fact_saturate
from ..saturation.saturate import saturate, suitable_count_bound
from .fuzz import case_seed, generate_program
from .pipeline import answer

logger = logging.getLogger(__name__)

FACT_SIZES = (10, 100, 1000, 10000)
SIDE_COUNTS = (0, 1, 2)

# fact closure must fit a fixed-degree polynomial in the number of facts
MAX_SLOPE = 3.5
MIN_R2 = 0.95


@dataclass
class BenchReport:
    suite: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    passed: bool = True

    def as_document(self) -> Dict[str, Any]:
        return {"suite": self.suite, "passed": self.passed, "rows": self.rows, "summary": self.summary}


# =========================
# Helpers
# =========================

def _ms(started: float) -> float:
    return round((time.perf_counter() - started) * 1000, 3)


def loglog_fit(sizes: Sequence[float], times: Sequence[float]) -> Dict[str, float]:
    """Slope and R² of log(time) against log(size)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.maximum(np.asarray(times, dtype=float), 1e-6))
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(residual ** 2)) / total if total > 0 else 1.0
    return {"slope": round(float(slope), 4), "r2": round(r2, 4)}


def polynomial_fit_ok(fit: Dict[str, float], max_slope: float = MAX_SLOPE, min_r2: float = MIN_R2) -> bool:
    return fit["slope"] <= max_slope and fit["r2"] >= min_r2


def chain_program(size: int) -> Program:
    """R-chain of `size` facts with U on its first element, under the successor/propagation rules."""
    x, y, z = Variable("x"), Variable("y"), Variable("z")
    sig = Signature((Relation("R", 2), Relation("U", 1, Kind.SIDE)))
    rules = (
        TGD((Atom("R", (x, y)),), (Atom("R", (y, z)),)),
        TGD((Atom("R", (x, y)), Atom("U", (x,))), (Atom("U", (y,)),)),
    )
    facts = {Atom("R", (Constant(f"c{i}"), Constant(f"c{i + 1}"))) for i in range(max(size - 1, 1))}
    facts.add(Atom("U", (Constant("c0"),)))
    return Program(sig, rules, Instance(frozenset(facts)))


def side_program(n_side: int) -> Program:
    """Ternary principal relation, n_side unary side relations; width 2."""
    x, y, z, u = (Variable(n) for n in "xyzu")
    side = [Relation(f"S{i + 1}", 1, Kind.SIDE) for i in range(n_side)]
    rules = [TGD((Atom("R", (x, y, z)),), (Atom("R", (y, z, u)),))]
    for rel in side:
        rules.append(TGD((Atom("R", (x, y, z)), Atom(rel.name, (y,))), (Atom(rel.name, (z,)),)))
        rules.append(TGD((Atom("R", (x, y, z)), Atom(rel.name, (x,))), (Atom("T", (y, z)),)))
    sig = Signature((Relation("R", 3), Relation("T", 2)) + tuple(side))
    return Program(sig, tuple(rules))


# =========================
# Suites
# =========================

def saturation_scaling(config: Optional[PipelineConfig] = None, sizes: Sequence[int] = SIDE_COUNTS) -> BenchReport:
    """Closure size and time per number of side relations; each point checked against the size bound."""
    report = BenchReport("saturation-scaling")
    for n_side in sizes:
        normalized, _ = normalize_program(side_program(n_side))
        sigma = normalized.ruleset
        started = time.perf_counter()
        closure = saturate(sigma)
        bound = suitable_count_bound(sigma.stats, len(sigma))
        report.rows.append({
            "side_relations": n_side,
            "rules": len(sigma),
            "closure_size": len(closure),
            "bound": bound,
            "within_bound": len(closure) <= bound,
            "ms": _ms(started),
        })
    report.summary = {"violations": sum(not r["within_bound"] for r in report.rows)}
    report.passed = report.summary["violations"] == 0
    return report


def fact_closure_scaling(config: Optional[PipelineConfig] = None, sizes: Sequence[int] = FACT_SIZES) -> BenchReport:
    report = BenchReport("fact-closure-scaling")
    normalized, _ = normalize_program(chain_program(2))
    sigma = normalized.ruleset
    closure = saturate(sigma)
    for size in sizes:
        instance = chain_program(size).instance
        started = time.perf_counter()
        result = fact_saturate(sigma, closure, instance)
        report.rows.append({"facts": len(instance), "added": len(result.added), "ms": _ms(started)})
    if len(report.rows) >= 2:
        report.summary = loglog_fit([r["facts"] for r in report.rows], [r["ms"] for r in report.rows])
        report.summary["monotone"] = all(
            a["ms"] <= b["ms"] for a, b in zip(report.rows, report.rows[1:])
        )
        report.passed = polynomial_fit_ok(report.summary)
        if not report.passed:
            logger.warning({"stage": "bench", "suite": report.suite, "slope": report.summary["slope"], "r2": report.summary["r2"]})
    logger.info({"stage": "bench", "suite": report.suite, **report.summary})
    return report


def end_to_end(config: Optional[PipelineConfig] = None, sizes: Sequence[int] = ()) -> BenchReport:
    """Per-stage wall times summed over config.cases generated programs."""
    config = config or get_settings()
    report = BenchReport("end-to-end")
    totals: Dict[str, float] = {}
    for index in range(config.cases):
        program = generate_program(random.Random(case_seed(config.seed, index)), config)
        started = time.perf_counter()
        _, run_report = answer(program, config)
        for stage, ms in run_report.timings_ms.items():
            totals[stage] = totals.get(stage, 0.0) + ms
        report.rows.append({"case": index, "queries": len(program.queries), "ms": _ms(started)})
    report.summary = {"cases": config.cases, "stage_ms": {k: round(v, 3) for k, v in sorted(totals.items())}}
    return report
