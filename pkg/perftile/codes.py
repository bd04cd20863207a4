# codes.py
"""
Hamming 거리와 타일링 → 1-perfect code

- representatives(U): projective 타일 U 의 점 대표원 U* 와, 그걸 열로 쓰는 행렬 H
- code_from_tiling(T): C = {c ∈ F_q^N : Hc ∈ V}
- verify_perfect(C, r): 반지름 r ball 들이 공간을 분할하는지
- code_stats / formula_check: rank, kernel 차원, period 개수를 직접 계산하고
  타일 쪽 불변량으로 예측한 값과 비교
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from perftile.errors import (
    CeilingExceeded,
    InvalidTilingError,
    NotProjectiveError,
    ParameterError,
)
from perftile.gf import FieldSpec
from perftile.linalg import (
    FMatrix,
    FVec,
    VSet,
    VectorLike,
    coords_of,
    is_keyed,
    keys_of,
    mat_vecs,
    rank_affine,
    rank_linear,
    solve,
    span_members,
)
from perftile.schemas.report import FormulaCheck
from perftile.schemas.verdict import PerfectVerdict
from perftile.settings import get_settings
from perftile.tiling import Tiling, is_projective, kernel, periods, restrict_to_span, verify_tiling
from perftile.utils.parallel import ordered_map, resolve_threads


# ----------------------------
# 1. Hamming 거리 / ball
# ----------------------------

def weight(v: VectorLike) -> int:
    coords = v.coords if isinstance(v, FVec) else v
    return sum(1 for c in coords if int(c) != 0)


def distance(a: VectorLike, b: VectorLike) -> int:
    ca = a.coords if isinstance(a, FVec) else tuple(a)
    cb = b.coords if isinstance(b, FVec) else tuple(b)
    if len(ca) != len(cb):
        raise ParameterError("distance between vectors of different lengths")
    return sum(1 for x, y in zip(ca, cb) if int(x) != int(y))


def ball_size(q: int, n: int, r: int) -> int:
    """|B_r| = Σ_{i<=r} C(n, i)(q-1)^i."""
    return sum(math.comb(n, i) * (q - 1) ** i for i in range(min(r, n) + 1))


@dataclass(frozen=True)
class Ball:
    field: FieldSpec
    n: int
    radius: int
    center: FVec

    def __post_init__(self):
        if not (0 <= self.radius <= self.n):
            raise ParameterError(f"radius {self.radius} must lie in [0, {self.n}]")
        if self.center.field != self.field or self.center.n != self.n:
            raise ParameterError("ball center lives in a different space")

    @property
    def size(self) -> int:
        return ball_size(self.field.q, self.n, self.radius)


def ball_offsets(field: FieldSpec, n: int, r: int) -> VSet:
    """weight <= r 인 모든 벡터 (0 중심 ball), key 순."""
    if not (0 <= r <= n):
        raise ParameterError(f"radius {r} must lie in [0, {n}]")
    nz = field.nonzero()
    rows = [np.zeros((1, n), dtype=field.dtype)]
    for w in range(1, r + 1):
        values = np.array(list(itertools.product(nz, repeat=w)), dtype=field.dtype)
        for support in itertools.combinations(range(n), w):
            block = np.zeros((len(values), n), dtype=field.dtype)
            block[:, list(support)] = values
            rows.append(block)
    return VSet.from_rows(field, n, np.concatenate(rows))


def ball_members(b: Ball) -> VSet:
    offsets = ball_offsets(b.field, b.n, b.radius)
    return VSet.from_rows(b.field, b.n, b.field.add_array(offsets.coords, b.center.as_array()[None, :]))


# ----------------------------
# 2. Code
# ----------------------------

@dataclass(frozen=True, eq=False)
class Code:
    field: FieldSpec
    N: int
    words: VSet
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.words.field != self.field or self.words.n != self.N:
            raise ParameterError(
                f"codewords live in F_{self.words.field.q}^{self.words.n}, expected F_{self.field.q}^{self.N}"
            )

    def __len__(self) -> int:
        return len(self.words)


def representatives(u: VSet) -> tuple[list[FVec], FMatrix]:
    """
    U 의 1차원 부분공간마다 대표원 하나 (첫 0 아닌 좌표 = 1), key 순.
    H 는 그 대표원들을 같은 순서로 열에 놓은 n × N 행렬.
    """
    if not is_projective(u):
        raise NotProjectiveError("U is not projective (not closed under nonzero scalars, or 0 ∉ U)")
    if len(u) == 1:
        raise ParameterError("U = {0} has no projective points")
    rows = u.coords[1:]  # keys[0] == 0
    lead = rows[np.arange(len(rows)), np.argmax(rows != 0, axis=1)]
    reps = rows[lead == 1]
    if len(reps) * (u.field.q - 1) != len(u) - 1:
        raise NotProjectiveError(f"N·(q-1) = {len(reps) * (u.field.q - 1)} != |U|-1 = {len(u) - 1}")
    ustar = [FVec(u.field, tuple(int(c) for c in r)) for r in reps]
    return ustar, FMatrix(u.field, reps.T.copy())


ENUM_CHUNK = 1 << 18


def code_from_tiling(
    t: Tiling,
    ceiling: Optional[int] = None,
    method: Literal["enumerate", "solve"] = "enumerate",
    verify: bool = True,
    threads: Optional[int] = None,
) -> Code:
    """
    C = {c ∈ F_q^N : Hc ∈ V}.

    - enumerate: F_q^N 를 key 순으로 덩어리째 훑는다. q^N <= ceiling 이어야 한다.
    - solve: V ∩ ⟨U⟩ 의 각 v 에 대해 Hc = v 의 해집합을 모은다. |C| <= ceiling 이어야 한다.
    두 방법의 결과는 같은 집합이다.
    """
    field = t.field
    if verify:
        verdict = verify_tiling(t, threads=threads)
        if not verdict.valid:
            raise InvalidTilingError(f"input is not a tiling: {verdict.summary()}")
    ustar, h = representatives(t.U)
    N = len(ustar)
    q = field.q
    if ceiling is None:
        ceiling = get_settings().enum_ceiling

    meta = {"source": t.meta, "method": method}

    if method == "enumerate":
        total = q ** N
        if total > ceiling:
            raise CeilingExceeded(
                f"code length N = {N}: enumerating q^N = {q}^{N} words exceeds the ceiling {ceiling}; "
                f"set PERFTILE_ENUM_CEILING to raise it",
                required=total,
                ceiling=ceiling,
                length=N,
            )

        def scan(start: int) -> np.ndarray:
            keys = np.arange(start, min(total, start + ENUM_CHUNK), dtype=np.int64)
            cs = coords_of(field, N, keys)
            return cs[t.V.contains_rows(mat_vecs(field, h.entries, cs))]

        found = ordered_map(scan, range(0, total, ENUM_CHUNK), threads)
        rows = np.concatenate(found) if found else np.zeros((0, N), dtype=field.dtype)
        return Code(field, N, VSet.from_rows(field, N, rows), meta=meta)

    if method == "solve":
        span = restrict_to_span(t)
        r = span.rank
        expected = len(span.v_span) * q ** (N - r)
        if expected > ceiling:
            raise CeilingExceeded(
                f"code length N = {N}: the code has {expected} words, above the ceiling {ceiling}",
                required=expected,
                ceiling=ceiling,
                length=N,
            )
        if len(span.v_span) == 0:
            return Code(field, N, VSet.empty(field, N), meta=meta)
        particulars = []
        kernel_basis = None
        for v in span.v_span:
            sol = solve(h, v)
            if not sol.consistent:
                raise InvalidTilingError(f"{list(v.coords)} lies in ⟨U⟩ but Hc = v has no solution")
            particulars.append(sol.particular.as_array())
            kernel_basis = sol.kernel_basis
        null = span_members(field, N, list(kernel_basis))
        words = field.add_array(np.stack(particulars)[:, None, :], null.coords[None, :, :]).reshape(-1, N)
        return Code(field, N, VSet.from_rows(field, N, words), meta=meta)

    raise ParameterError(f"unknown method {method!r}")


# ----------------------------
# 3. perfect code 검증
# ----------------------------

def _offset_keys(field: FieldSpec, words: VSet, offset: np.ndarray, powers: np.ndarray) -> np.ndarray:
    """key(c + e) 를 key(c) 에 바뀐 좌표의 차이만 더해서 계산한다."""
    keys = words.keys.copy()
    for i in np.flatnonzero(offset):
        col = words.coords[:, i]
        shifted = field.add_array(col, offset[i])
        keys += (shifted.astype(np.int64) - col.astype(np.int64)) * powers[i]
    return keys


def verify_perfect(
    c: Code,
    r: int = 1,
    threads: Optional[int] = None,
    ceiling: Optional[int] = None,
) -> PerfectVerdict:
    """
    반지름 r ball 들이 서로 겹치지 않고 F_q^N 을 덮는지.

    ball offset e 를 key 순으로 돌면서 모든 codeword 의 c + e 를 occupancy 배열에 찍는다.
    처음 충돌이 난 offset 에서 key 가 가장 작은 벡터가 witness 다. 충돌이 없으면
    덮이지 않은 벡터 수와 key 가 가장 작은 미피복 벡터를 보고한다.
    """
    field, N = c.field, c.N
    q = field.q
    if len(c) == 0:
        raise ParameterError("empty code")
    offsets = ball_offsets(field, N, r)
    space = q ** N
    base = dict(
        q=q,
        length=N,
        radius=r,
        code_size=len(c),
        ball_size=len(offsets),
        space_size=space,
    )
    if ceiling is None:
        ceiling = get_settings().enum_ceiling
    if space > ceiling or not is_keyed(field, N):
        return _verify_perfect_sorted(c, offsets, base)

    powers = np.array([q**i for i in range(N)], dtype=np.int64)
    occupied = np.zeros(space, dtype=bool)

    def shifted_keys(e: np.ndarray) -> np.ndarray:
        return _offset_keys(field, c.words, e, powers)

    window = resolve_threads(threads)
    rows = list(offsets.coords)
    for start in range(0, len(rows), window):
        for keys in ordered_map(shifted_keys, rows[start : start + window], threads):
            hits = occupied[keys]
            if hits.any():
                return _collision(c, offsets, int(keys[hits].min()), base)
            occupied[keys] = True

    uncovered = space - len(c) * len(offsets)
    if uncovered:
        first = int(np.argmin(occupied))
        return PerfectVerdict(
            valid=False,
            reason="uncovered",
            uncovered_count=uncovered,
            uncovered_witness=[int(x) for x in coords_of(field, N, [first])[0]],
            **base,
        )
    return PerfectVerdict(valid=True, reason="ok", uncovered_count=0, **base)


def _collision(c: Code, offsets: VSet, key: int, base: dict) -> PerfectVerdict:
    field = c.field
    x = coords_of(field, c.N, np.asarray([key], dtype=c.words.keys.dtype))[0]
    near = field.sub_array(x[None, :], offsets.coords)
    owners = VSet.from_rows(field, c.N, near[c.words.contains_rows(near)])
    return PerfectVerdict(
        valid=False,
        reason="collision",
        collision_witness=[int(v) for v in x],
        collision_codewords=[[int(v) for v in row] for row in owners.coords[:2]],
        **base,
    )


def _verify_perfect_sorted(c: Code, offsets: VSet, base: dict) -> PerfectVerdict:
    """occupancy 배열을 못 쓸 때: 모든 ball 원소의 key 를 모아 정렬한다."""
    field, N = c.field, c.N
    parts = [
        keys_of(field, field.add_array(c.words.coords, e[None, :]))
        for e in offsets.coords
    ]
    keys, counts = np.unique(np.concatenate(parts), return_counts=True)
    if np.any(counts > 1):
        return _collision(c, offsets, keys[counts > 1][0], base)
    uncovered = base["space_size"] - len(keys)
    if uncovered:
        # 정렬된 key 에서 처음으로 i 번째 key != i 인 자리
        first = len(keys)
        for i, k in enumerate(keys):
            if int(k) != i:
                first = i
                break
        return PerfectVerdict(
            valid=False,
            reason="uncovered",
            uncovered_count=uncovered,
            uncovered_witness=list(FVec.from_key(field, N, first).coords),
            **base,
        )
    return PerfectVerdict(valid=True, reason="ok", uncovered_count=0, **base)


# ----------------------------
# 4. 불변량 / 공식 교차검증
# ----------------------------

@dataclass(frozen=True)
class CodeStats:
    rank: int
    kernel_dim: int
    period_count: int
    full_rank: bool


def code_stats(c: Code, threads: Optional[int] = None) -> CodeStats:
    per = periods(c.words, threads=threads)
    _, kdim = kernel(c.words, period_set=per)
    r = rank_affine(c.words)
    return CodeStats(rank=r, kernel_dim=kdim, period_count=len(per), full_rank=r == c.N)


def formula_check(
    t: Tiling,
    c: Code,
    stats: Optional[CodeStats] = None,
    threads: Optional[int] = None,
) -> list[FormulaCheck]:
    """
    V_U = V ∩ ⟨U⟩, r = dim⟨U⟩ 일 때

        rank(C)       = rank(V_U) + N - r
        dim ker(C)    = dim ker(V_U) + N - r
        |per(C)|      = |per(V_U)| · q^(N - r)
    """
    if stats is None:
        stats = code_stats(c, threads=threads)
    span = restrict_to_span(t)
    v_u = span.v_span
    shift = c.N - rank_linear(t.U)
    per_v = periods(v_u, threads=threads)
    _, kdim_v = kernel(v_u, period_set=per_v)
    return [
        FormulaCheck(quantity="rank", predicted=rank_affine(v_u) + shift, measured=stats.rank),
        FormulaCheck(quantity="kernel_dim", predicted=kdim_v + shift, measured=stats.kernel_dim),
        FormulaCheck(
            quantity="period_count",
            predicted=len(per_v) * t.field.q ** shift,
            measured=stats.period_count,
        ),
    ]


__all__ = [
    "Ball",
    "Code",
    "CodeStats",
    "ball_members",
    "ball_offsets",
    "ball_size",
    "code_from_tiling",
    "code_stats",
    "distance",
    "formula_check",
    "representatives",
    "verify_perfect",
    "weight",
]
