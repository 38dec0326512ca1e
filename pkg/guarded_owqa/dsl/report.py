# -*- coding: utf-8 -*-
# guarded_owqa/dsl/report.py
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

STAT_KEYS = (
    "ruleCountIn",
    "saturatedCount",
    "suitableBound",
    "childishTypeCount",
    "linearRuleCount",
    "oracleVerdicts",
)


@dataclass
class QueryResult:
    query: str
    answer: bool
    disjuncts: int = 0
    max_depth: int = 0
    certificate: Optional[Dict[str, Any]] = None


@dataclass
class Report:
    answers: List[QueryResult] = field(default_factory=list)
    statistics: Dict[str, Any] = field(default_factory=dict)
    timings_ms: Dict[str, float] = field(default_factory=dict)

    @property
    def has_certificates(self) -> bool:
        return any(a.certificate is not None for a in self.answers)


def report_document(report: Report, include_certificate: bool = False) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "answers": [
            {
                "query": a.query,
                "answer": a.answer,
                "disjuncts": a.disjuncts,
                "maxDepth": a.max_depth,
            }
            for a in report.answers
        ],
        "statistics": {key: report.statistics.get(key) for key in STAT_KEYS},
        "timings_ms": {k: round(v, 3) for k, v in report.timings_ms.items()},
    }
    if include_certificate:
        doc["certificate"] = [a.certificate for a in report.answers]
    return doc


def emit_report(report: Report, include_certificate: bool = False) -> str:
    """JSON text; key order is fixed by construction, never sorted."""
    return json.dumps(report_document(report, include_certificate), indent=2, ensure_ascii=False) + "\n"
