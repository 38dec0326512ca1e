# -*- coding: utf-8 -*-
# guarded_owqa/exceptions.py
from __future__ import annotations

from typing import Sequence


class GuardedOwqaError(Exception):
    """Root of every error raised by the package."""


# =========================
# Input diagnostics
# =========================

class DiagnosticError(GuardedOwqaError):
    """An input problem that can be pointed at (line/column are 1-based, 0 = unknown)."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line:
            return f"line {self.line}, col {self.col}: {self.message}"
        return self.message


class ProgramSyntaxError(DiagnosticError):
    pass


class ArityMismatchError(DiagnosticError):
    pass


class UndeclaredRelationError(DiagnosticError):
    pass


class EmptyRuleError(DiagnosticError):
    pass


# =========================
# Transformation errors
# =========================

class UnguardedRuleError(DiagnosticError):
    pass


class NotObeyingError(DiagnosticError):
    pass


class HeadConstantError(DiagnosticError):
    pass


class UnguardedFactError(GuardedOwqaError):
    pass


class IllegalStrategyInputError(GuardedOwqaError):
    pass


class NotDecomposableError(GuardedOwqaError):
    def __init__(self, cycle: Sequence[tuple[str, int]]):
        self.cycle = tuple(cycle)
        super().__init__("position graph has a cycle: " + format_cycle(self.cycle))


class CapExceededError(GuardedOwqaError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"rewriting exceeded {cap} disjuncts")


# =========================
# Internal failures
# =========================

class ModeDisagreementError(GuardedOwqaError):
    pass


class CertificationFailureError(GuardedOwqaError):
    pass


class BoundViolationError(GuardedOwqaError):
    pass


class ConfigError(GuardedOwqaError):
    pass


def format_cycle(cycle: Sequence[tuple[str, int]]) -> str:
    """Render a position-graph cycle as R[1]→R[2]→R[1]."""
    if not cycle:
        return ""
    nodes = [f"{rel}[{pos}]" for rel, pos in cycle]
    return "→".join(nodes + [nodes[0]])
