# schemas/__init__.py

# Verification verdicts
from .verdict import (
    TilingVerdict,
    PerfectVerdict,
    FactorizationVerdict,
)

# Reports
from .report import (
    Skipped,
    ObjectStats,
    CheckResult,
    FormulaCheck,
    SearchSummary,
    StatsReport,
)

# File headers
from .files import TileHeader


__all__ = [
    # verdicts
    "TilingVerdict",
    "PerfectVerdict",
    "FactorizationVerdict",

    # reports
    "Skipped",
    "ObjectStats",
    "CheckResult",
    "FormulaCheck",
    "SearchSummary",
    "StatsReport",

    # files
    "TileHeader",
]
