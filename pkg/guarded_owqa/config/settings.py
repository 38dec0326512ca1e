# -*- coding: utf-8 -*-
# guarded_owqa/config/settings.py
from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

from ..exceptions import ConfigError

SETTINGS_FILE = Path(__file__).with_name("pipeline_settings.json")

ENGINES = ("rewrite", "chase", "both")

# fields that may legitimately be zero
_NON_NEGATIVE = {"chase_depth", "side_arity"}


@dataclass(frozen=True)
class PipelineConfig:
    engine: str = "rewrite"
    certify: bool = False
    cross_check: bool = False
    oracle_budget: int = 2000
    lemma_budget: int = 500
    rewrite_cap: int = 20000
    chase_depth: int = 0
    chase_node_cap: int = 100000
    seed: int = 1
    cases: int = 500
    workers: int = 1
    max_relations: int = 4
    max_arity: int = 3
    side_arity: int = 1
    max_width: int = 2
    max_rules: int = 5
    max_facts: int = 6
    max_query_atoms: int = 3

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        cfg = replace(self, **{k: v for k, v in overrides.items() if v is not None})
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {', '.join(ENGINES)}, got {self.engine!r}")
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type not in ("int", int) or isinstance(value, bool):
                continue
            floor = 0 if f.name in _NON_NEGATIVE else 1
            if value < floor:
                raise ConfigError(f"{f.name} must be >= {floor}, got {value}")
        if self.max_arity < 1 or self.max_relations < 1:
            raise ConfigError("scale needs at least one relation of arity >= 1")


# =========================
# Helpers
# =========================

def _coerce(fieldtype: str, raw: Any) -> Any:
    if fieldtype == "Check":
        return str(raw).strip().lower() in ("1", "true", "yes", "on")
    if fieldtype == "Int":
        try:
            return int(str(raw).strip())
        except ValueError:
            raise ConfigError(f"expected an integer, got {raw!r}") from None
    return str(raw)


@lru_cache(maxsize=1)
def _field_table() -> tuple[Dict[str, Any], ...]:
    doc = json.loads(SETTINGS_FILE.read_text(encoding="utf-8"))
    by_name = {f["fieldname"]: f for f in doc.get("fields", [])}
    return tuple(by_name[name] for name in doc.get("field_order", []) if name in by_name)


# =========================
# Public API
# =========================

def get_settings(**overrides: Any) -> PipelineConfig:
    """
    Build the pipeline configuration.
    Layers, later wins: JSON field defaults, environment variables named by a
    field's "env" key, then keyword overrides (None values are ignored).
    """
    values: Dict[str, Any] = {}
    for field in _field_table():
        name, kind = field["fieldname"], field.get("fieldtype", "Data")
        if "default" in field:
            values[name] = _coerce(kind, field["default"])
        env_name = field.get("env")
        if env_name and os.environ.get(env_name, "").strip():
            values[name] = _coerce(kind, os.environ[env_name])
    cfg = PipelineConfig(**values)
    return cfg.with_overrides(**overrides)
