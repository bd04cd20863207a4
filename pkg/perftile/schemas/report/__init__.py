# schemas/report/__init__.py

from __future__ import annotations

from .common import (
    CheckResult,
    FormulaCheck,
    ObjectKind,
    ObjectStats,
    SearchSummary,
    Skipped,
    StatsReport,
    not_applicable,
)

__all__ = [
    "CheckResult",
    "FormulaCheck",
    "ObjectKind",
    "ObjectStats",
    "SearchSummary",
    "Skipped",
    "StatsReport",
    "not_applicable",
]
