# utils/report_builder.py
"""
집합 하나 → ObjectStats, 그리고 단계별 시간 측정

- 계산하지 않은 값은 비워두지 않고 Skipped(reason=...) 로 채운다.
- 시간은 --timings 일 때만 기록한다. (기본 보고서는 실행마다 바이트 단위로 같아야 함)
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Iterator, Optional, Union

from perftile.linalg import VSet, rank_affine, rank_linear
from perftile.schemas.report import ObjectKind, ObjectStats, Skipped
from perftile.tiling import is_projective, kernel, periods


def object_stats(
    s: VSet,
    kind: ObjectKind,
    threads: Optional[int] = None,
    invariants: bool = True,
) -> ObjectStats:
    """
    tile / code: affine rank, kernel 차원, period 개수, projective 여부.
    points: 대표원이 생성하는 부분공간의 차원만 (나머지는 점 집합에서 정의되지 않음).
    """
    base = dict(kind=kind, q=s.field.q, n=s.n, size=len(s))

    if kind == "points":
        na = Skipped(reason="not defined for point sets")
        r = rank_linear(s) if len(s) else 0
        return ObjectStats(
            rank=r,
            full_rank=r == s.n,
            kernel_dim=na,
            period_count=na,
            projective=na,
            **base,
        )

    if len(s) == 0:
        empty = Skipped(reason="empty set")
        return ObjectStats(rank=empty, full_rank=empty, kernel_dim=empty, period_count=empty, projective=False, **base)

    r = rank_affine(s)
    if invariants:
        per = periods(s, threads=threads)
        _, kdim = kernel(s, period_set=per)
        kernel_dim: Union[int, Skipped] = kdim
        period_count: Union[int, Skipped] = len(per)
    else:
        kernel_dim = period_count = Skipped(reason="invariants disabled")
    return ObjectStats(
        rank=r,
        full_rank=r == s.n,
        kernel_dim=kernel_dim,
        period_count=period_count,
        projective=is_projective(s),
        **base,
    )


class Timings:
    """
    with timings.step("verify"): ...

    enabled=False 면 아무것도 기록하지 않는다.
    """

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.values: dict[str, float] = {}

    @contextmanager
    def step(self, name: str) -> Iterator[None]:
        if not self.enabled:
            yield
            return
        start = time.perf_counter()
        try:
            yield
        finally:
            self.values[name] = round(time.perf_counter() - start, 4)

    def report(self) -> Union[dict[str, float], Skipped]:
        if not self.enabled:
            return Skipped(reason="timings disabled")
        return dict(self.values)
