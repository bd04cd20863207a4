# schemas/verdict/__init__.py

"""
schemas.verdict 패키지

- 세 가지 검증기(tiling / perfect / factorization)의 결과 모델을 노출한다.
"""

from __future__ import annotations

from .common import (
    FactorizationFailure,
    FactorizationVerdict,
    PerfectFailure,
    PerfectVerdict,
    TilingFailure,
    TilingVerdict,
)

__all__ = [
    "FactorizationFailure",
    "FactorizationVerdict",
    "PerfectFailure",
    "PerfectVerdict",
    "TilingFailure",
    "TilingVerdict",
]
