# -*- coding: utf-8 -*-
# guarded_owqa/linear/decide.py
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from ..exceptions import CapExceededError, ModeDisagreementError, NotDecomposableError
from ..logic.homomorphism import FactIndex, find_homomorphism
from ..logic.model import ConjunctiveQuery
from .linearizer import LinearProgram
from .position_graph import semi_width
from .rewriting import ucq_rewrite
from .tight_chase import TightChaseResult, tight_chase

logger = logging.getLogger(__name__)

MODES = ("rewrite", "chase", "both")


@dataclass(frozen=True)
class LinearDecision:
    answer: bool
    disjuncts: int = 0
    max_depth: int = 0
    witness: Optional[TightChaseResult] = None


def depth_bound(k: int, sigma_size: int, m: int, w: int, sigma2_size: Optional[int] = None) -> int:
    """k·|Σ|·(m+w)^w; with a semi-width split, k·max(|Σ|², |Σ₂|·|Σ|)·(m+w)^w."""
    if sigma2_size is None:
        return k * sigma_size * (m + w) ** w
    return k * max(sigma_size ** 2, sigma2_size * sigma_size) * (m + w) ** w


def program_depth_bound(query: ConjunctiveQuery, lin: LinearProgram) -> int:
    rules = lin.tgds
    m = max([1] + [r.arity for r in lin.signature])
    try:
        split = semi_width(rules, lin.w)
    except NotDecomposableError:
        return depth_bound(len(query.atoms), len(rules), m, max(r.width for r in rules))
    return depth_bound(len(query.atoms), len(rules), m, lin.w, len(split.sigma2))


def _by_chase(query: ConjunctiveQuery, lin: LinearProgram, node_cap: int, depth: int) -> TightChaseResult:
    bound = depth or program_depth_bound(query, lin)
    return tight_chase(query.atoms, lin.tgds, lin.instance, bound, node_cap)


def decide_linear(
    query: ConjunctiveQuery,
    lin: LinearProgram,
    mode: str = "rewrite",
    cap: int = 20000,
    node_cap: int = 100000,
    depth: int = 0,
) -> LinearDecision:
    """
    rewrite: search a UCQ rewriting for a disjunct matching the linear instance
    (falls back to the tight chase when the cap is hit); chase: tight chase only;
    both: run both and require agreement whenever the chase search was complete.
    depth 0 uses program_depth_bound.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode}")
    index = FactIndex(lin.instance.sorted_facts())
    if find_homomorphism(query.atoms, index) is not None:
        return LinearDecision(True)

    rewritten = None
    if mode in ("rewrite", "both"):
        try:
            rewritten = ucq_rewrite(
                query, lin.tgds, cap,
                stop=lambda cq: find_homomorphism(cq.atoms, index) is not None,
            )
        except CapExceededError:
            mode = "chase"
    if mode == "rewrite":
        return LinearDecision(rewritten.matched is not None, len(rewritten))

    chased = _by_chase(query, lin, node_cap, depth)
    if rewritten is None:
        return LinearDecision(chased.entailed, 0, chased.max_depth, chased)
    by_rewrite = rewritten.matched is not None
    if chased.complete and chased.entailed != by_rewrite:
        logger.error({"title": "mode disagreement", "message": f"rewrite={by_rewrite} chase={chased.entailed} for {query}"})
        raise ModeDisagreementError(f"rewrite says {by_rewrite}, tight chase says {chased.entailed} for {query}")
    return LinearDecision(by_rewrite, len(rewritten), chased.max_depth, chased)
