# tiling.py
"""
F_q^n 의 타일링

- Tiling: (U, V) 쌍. 타일링인지 여부는 verify_tiling 이 판정한다 (타입이 보장하지 않음).
- periods / kernel / is_projective: 타일 하나의 불변량.
- construct_semiprojective / construct_projective: 두 가지 구성.

좌표 규약 (구성 공통):
    x_0 .. x_{m-1}  →  좌표 0 .. m-1
    y_0 .. y_{m-1}  →  좌표 m .. 2m-1
    순환 인덱스는 전부 mod m.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from perftile.errors import (
    CeilingExceeded,
    ConstructionError,
    DimensionMismatch,
    ParameterError,
)
from perftile.gf import FieldSpec
from perftile.linalg import (
    FVec,
    VSet,
    all_vectors,
    coords_of,
    in_span,
    is_full_rank,
    is_keyed,
    iter_row_chunks,
    keys_of,
    rank_affine,
    row_reduce,
    sumset,
)
from perftile.schemas.report import CheckResult
from perftile.schemas.verdict import TilingVerdict
from perftile.settings import get_settings
from perftile.utils.parallel import ordered_map, resolve_threads


@dataclass(frozen=True, eq=False)
class Tiling:
    """타일 쌍 (U, V). meta 에는 구성 파라미터나 원본 파일 경로를 넣는다."""

    field: FieldSpec
    n: int
    U: VSet
    V: VSet
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        for name, s in (("U", self.U), ("V", self.V)):
            if s.field != self.field or s.n != self.n:
                raise DimensionMismatch(
                    f"tile {name} lives in F_{s.field.q}^{s.n}, expected F_{self.field.q}^{self.n}"
                )


def _row(arr) -> list[int]:
    return [int(c) for c in arr]


# ----------------------------
# 1. 타일링 검증
# ----------------------------

def verify_tiling(
    t: Tiling,
    threads: Optional[int] = None,
    ceiling: Optional[int] = None,
) -> TilingVerdict:
    """
    |U|·|V| = q^n 이고 모든 합 u+v 가 서로 다르면 타일링.

    U 를 덩어리로 나눠 합의 key 를 occupancy 배열에 찍는다. 처음으로 충돌이 난
    덩어리에서 key 가 가장 작은 충돌 벡터를 witness 로 고른다.
    """
    U, V = t.U, t.V
    field = t.field
    q, n = field.q, t.n
    space = q ** n
    base = dict(q=q, n=n, size_u=len(U), size_v=len(V), space_size=space)

    if len(U) == 0 or len(V) == 0:
        raise ParameterError("tiles must be nonempty")
    if len(U) * len(V) != space:
        return TilingVerdict(valid=False, reason="cardinality", **base)

    if ceiling is None:
        ceiling = get_settings().enum_ceiling
    if space > ceiling or not is_keyed(field, n):
        raise CeilingExceeded(
            f"verifying a tiling of F_{q}^{n} needs an occupancy array of {space} entries "
            f"(ceiling {ceiling}, set PERFTILE_ENUM_CEILING to raise it)",
            required=space,
            ceiling=ceiling,
        )

    chunks = list(iter_row_chunks(len(U), len(V) * n))

    def sum_keys(sl: slice) -> np.ndarray:
        s = field.add_array(U.coords[sl, None, :], V.coords[None, :, :])
        return keys_of(field, s).ravel()

    occupied = np.zeros(space, dtype=bool)
    window = resolve_threads(threads)
    for start in range(0, len(chunks), window):
        batch = ordered_map(sum_keys, chunks[start : start + window], threads)
        for keys in batch:
            ordered = np.sort(keys)
            repeated = ordered[1:][ordered[1:] == ordered[:-1]]
            bad = np.concatenate([keys[occupied[keys]], repeated])
            if bad.size:
                return _collision_verdict(t, int(bad.min()), base)
            occupied[keys] = True

    # |U|·|V| = q^n 이고 충돌이 없으면 전부 덮였다.
    if not occupied.all():
        missing = int(np.argmin(occupied))
        return TilingVerdict(
            valid=False,
            reason="uncovered",
            uncovered=_row(coords_of(field, n, [missing])[0]),
            **base,
        )
    return TilingVerdict(valid=True, reason="ok", **base)


def _collision_verdict(t: Tiling, key: int, base: dict) -> TilingVerdict:
    field = t.field
    s = coords_of(field, t.n, [key])[0]
    # s - u ∈ V 인 u 를 key 순으로 두 개
    diffs = field.sub_array(s[None, :], t.U.coords)
    hit = np.flatnonzero(t.V.contains_rows(diffs))[:2]
    if hit.size < 2:
        raise ConstructionError(f"collision at {_row(s)} could not be recovered")
    u1, u2 = t.U.coords[hit[0]], t.U.coords[hit[1]]
    return TilingVerdict(
        valid=False,
        reason="collision",
        witness_u1=_row(u1),
        witness_v1=_row(diffs[hit[0]]),
        witness_u2=_row(u2),
        witness_v2=_row(diffs[hit[1]]),
        witness_sum=_row(s),
        **base,
    )


# ----------------------------
# 2. period / kernel / projective
# ----------------------------

SIEVE_MEMBERS = 16


def periods(s: VSet, threads: Optional[int] = None) -> VSet:
    """
    per(S) = {v : S + v = S}.

    후보는 S - s0 (s0 = key 최소 원소). 앞의 몇 개 원소로 먼저 걸러낸 뒤,
    살아남은 후보를 key 순으로 돌면서 이미 찾은 group 의 원소는 건너뛰고
    나머지만 전체 검사한다. 찾을 때마다 group 을 F_p-배수로 닫는다.
    """
    if len(s) == 0:
        raise ParameterError("periods of an empty set are undefined")
    field = s.field
    cand = field.sub_array(s.coords, s.coords[0][None, :])
    order = np.argsort(keys_of(field, cand), kind="stable")
    cand = cand[order]

    probe = s.coords[:SIEVE_MEMBERS]

    def sieve(sl: slice) -> np.ndarray:
        shifted = field.add_array(cand[sl, None, :], probe[None, :, :])
        return np.all(s.contains_rows(shifted.reshape(-1, s.n)).reshape(shifted.shape[:2]), axis=1)

    chunks = list(iter_row_chunks(len(cand), len(probe) * s.n))
    survivors = cand[np.concatenate(ordered_map(sieve, chunks, threads))]

    group = VSet.zero(field, s.n)
    prime_scalars = field.prime_subfield()
    for d in survivors:
        if group.contains_rows(d[None, :])[0]:
            continue
        if not np.all(s.contains_rows(field.add_array(s.coords, d[None, :]))):
            continue
        multiples = field.mul_array(prime_scalars[:, None], d[None, :])
        group = VSet.from_rows(
            field,
            s.n,
            field.add_array(group.coords[:, None, :], multiples[None, :, :]).reshape(-1, s.n),
        )
    return group


def kernel(s: VSet, period_set: Optional[VSet] = None, threads: Optional[int] = None) -> tuple[list[FVec], int]:
    """
    q-kernel: per(S) 안의 가장 큰 F_q-부분공간. (기저, 차원)을 돌려준다.
    """
    per = period_set if period_set is not None else periods(s, threads=threads)
    field = s.field
    keep = np.ones(len(per), dtype=bool)
    if not field.is_prime_field:
        for lam in field.nonzero()[1:]:
            keep &= per.contains_rows(field.scale_array(int(lam), per.coords))
    rows = per.coords[keep]
    if rows.shape[0] <= 1:
        return [], 0
    R, _ = row_reduce(field, rows)
    basis = [FVec(field, tuple(int(c) for c in r)) for r in R]
    return basis, len(basis)


def is_projective(s: VSet) -> bool:
    """0 ∈ S 이고 모든 λ ≠ 0 에 대해 λS ⊆ S."""
    if not s.has_zero:
        return False
    for lam in s.field.nonzero()[1:]:
        if not np.all(s.contains_rows(s.field.scale_array(int(lam), s.coords))):
            return False
    return True


def is_aperiodic(s: VSet, threads: Optional[int] = None) -> bool:
    return len(periods(s, threads=threads)) == 1


# ----------------------------
# 3. 구성 공통
# ----------------------------

@dataclass(frozen=True, eq=False)
class SurgeryPiece:
    """H 에서 빼는 조각 H_{i,γ} 와 그 자리에 넣는 조각 U_{i,γ}."""

    i: int
    gamma: int
    removed: VSet
    inserted: VSet


def _unit(field: FieldSpec, n: int, idx: int, value: int = 1) -> np.ndarray:
    row = np.zeros(n, dtype=field.dtype)
    row[idx] = value
    return row


def _check_params(field: FieldSpec, m: int, min_m: int) -> None:
    if field.q <= 2:
        raise ParameterError("field cardinality larger than 2 required")
    if m < min_m:
        raise ParameterError(f"m ≥ {min_m} required")


def _x_block(field: FieldSpec, m: int) -> np.ndarray:
    """H = ⟨x_0..x_{m-1}⟩ 전체 (y-블록 0)."""
    xs = all_vectors(field, m)
    return np.concatenate([xs, np.zeros_like(xs)], axis=1)


def _pieces(field: FieldSpec, m: int, span_width: int) -> list[SurgeryPiece]:
    """
    span_width = 1:  H_{i,γ} = ⟨x_i⟩ + γx_{i+1},            U_{i,γ} = H_{i,γ} + γy_i
    span_width = 2:  H_{i,γ} = ⟨x_i, x_{i+1}⟩ + γx_{i+2},   U_{i,γ} = H_{i,γ} + γy_{i+1}
    """
    n = 2 * m
    elems = field.elements()
    pieces = []
    for i in range(m):
        span_rows = np.zeros((1, n), dtype=field.dtype)
        for j in range(span_width):
            b = _unit(field, n, (i + j) % m)
            mult = field.mul_array(elems[:, None], b[None, :])
            span_rows = field.add_array(span_rows[:, None, :], mult[None, :, :]).reshape(-1, n)
        shift_x = (i + span_width) % m
        shift_y = m + (i + span_width - 1) % m
        for g in field.nonzero():
            g = int(g)
            h = field.add_array(span_rows, _unit(field, n, shift_x, g)[None, :])
            u = field.add_array(h, _unit(field, n, shift_y, g)[None, :])
            pieces.append(
                SurgeryPiece(i=i, gamma=g, removed=VSet.from_rows(field, n, h), inserted=VSet.from_rows(field, n, u))
            )
    return pieces


def semiprojective_pieces(field: FieldSpec, m: int) -> list[SurgeryPiece]:
    return _pieces(field, m, span_width=1)


def projective_pieces(field: FieldSpec, m: int) -> list[SurgeryPiece]:
    return _pieces(field, m, span_width=2)


def pieces_disjoint(pieces: list[SurgeryPiece]) -> Optional[tuple[str, SurgeryPiece, SurgeryPiece]]:
    """
    모든 removed 조각끼리, 모든 inserted 조각끼리 서로소인지.

    겹치는 쌍이 있으면 ("removed" | "inserted", a, b) 를 (앞 조각 순서로) 돌려준다. 없으면 None.
    """
    for side in ("removed", "inserted"):
        keys = np.concatenate([getattr(p, side).keys for p in pieces])
        owner = np.concatenate([np.full(len(getattr(p, side)), k) for k, p in enumerate(pieces)])
        order = np.lexsort((owner, keys))
        keys, owner = keys[order], owner[order]
        same = np.flatnonzero(keys[1:] == keys[:-1])
        if same.size:
            pairs = sorted({(int(owner[j]), int(owner[j + 1])) for j in same})
            a, b = pairs[0]
            return side, pieces[a], pieces[b]
    return None


def _surgery(field: FieldSpec, m: int, pieces: list[SurgeryPiece]) -> VSet:
    overlap = pieces_disjoint(pieces)
    if overlap is not None:
        side, a, b = overlap
        raise ConstructionError(
            f"{side} pieces (i={a.i}, γ={a.gamma}) and (i={b.i}, γ={b.gamma}) overlap"
        )
    n = 2 * m
    h = VSet.from_rows(field, n, _x_block(field, m))
    removed = VSet.from_rows(field, n, np.concatenate([p.removed.coords for p in pieces]))
    inserted = VSet.from_rows(field, n, np.concatenate([p.inserted.coords for p in pieces]))
    if not removed.intersection(h) == removed:
        raise ConstructionError("removed pieces are not inside H")
    u = h.difference(removed).union(inserted)
    if len(u) != field.q ** m:
        raise ConstructionError(f"|U| = {len(u)}, expected {field.q ** m}")
    return u


# ----------------------------
# 4. 두 가지 구성
# ----------------------------

def construct_semiprojective(field: FieldSpec, m: int) -> Tiling:
    """
    F_q^{2m} 의 full-rank aperiodic semiprojective 타일링. q ≥ 3, m ≥ 3.

    V = V_0 + ... + V_{m-1},  V_i = {λy_i : λ ≠ 1} ∪ {x_i + y_i}
    U = H 에서 H_{i,γ} 를 빼고 U_{i,γ} 를 넣은 것
    """
    _check_params(field, m, 3)
    n = 2 * m

    u = _surgery(field, m, semiprojective_pieces(field, m))

    v = VSet.zero(field, n)
    for i in range(m):
        y = _unit(field, n, m + i)
        rows = [field.scale_array(int(lam), y) for lam in field.elements() if lam != 1]
        rows.append(field.add_array(_unit(field, n, i), y))
        v = sumset(v, VSet.from_rows(field, n, np.stack(rows)), strict=True)

    return Tiling(field, n, u, v, meta={"construction": "semiprojective", "m": m})


def v_map_rows(field: FieldSpec, m: int, z: np.ndarray) -> np.ndarray:
    """
    z (M, m) → v(z) (M, 2m).

    x-블록 i 번 좌표 = z_i  (z_{i+1} == 0 일 때), 아니면 0.  y-블록 = z.
    """
    z = np.asarray(z, dtype=field.dtype)
    nxt = np.roll(z, -1, axis=1)
    x = np.where(nxt == 0, z, 0).astype(field.dtype)
    return np.concatenate([x, z], axis=1)


def v_map(field: FieldSpec, m: int, z) -> FVec:
    z = np.asarray(z, dtype=field.dtype)
    if z.shape != (m,):
        raise DimensionMismatch(f"v-map takes a vector of length {m}")
    return FVec(field, tuple(int(c) for c in v_map_rows(field, m, z[None, :])[0]))


def construct_projective(field: FieldSpec, m: int) -> Tiling:
    """
    F_q^{2m} 의 full-rank aperiodic projective 타일링. q ≥ 3, m ≥ 5.

    V = {v(z) : z ∈ ⟨y_0..y_{m-1}⟩}
    U = H 에서 H_{i,γ} = ⟨x_i, x_{i+1}⟩ + γx_{i+2} 를 빼고 U_{i,γ} = H_{i,γ} + γy_{i+1} 를 넣은 것
    """
    _check_params(field, m, 5)
    n = 2 * m

    u = _surgery(field, m, projective_pieces(field, m))
    v = VSet.from_rows(field, n, v_map_rows(field, m, all_vectors(field, m)))
    if len(v) != field.q ** m:
        raise ConstructionError(f"|V| = {len(v)}, expected {field.q ** m}")

    return Tiling(field, n, u, v, meta={"construction": "projective", "m": m})


# ----------------------------
# 5. 체크리스트 / span 으로 제한
# ----------------------------

def tiling_checklist(
    t: Tiling,
    require_projective_v: bool = False,
    threads: Optional[int] = None,
    verdict: Optional[TilingVerdict] = None,
) -> list[CheckResult]:
    """
    타일링 / projective / full-rank / aperiodic 을 각각 계산해서 항목별로 돌려준다.
    verdict 를 넘기면 verify_tiling 을 다시 돌리지 않는다.
    """
    checks = []
    if verdict is None:
        verdict = verify_tiling(t, threads=threads)
    checks.append(CheckResult(name="(U, V) tiling", passed=verdict.valid, detail=verdict.summary()))

    checks.append(CheckResult(name="U projective", passed=is_projective(t.U)))
    if require_projective_v:
        checks.append(CheckResult(name="V projective", passed=is_projective(t.V)))

    for name, s in (("U", t.U), ("V", t.V)):
        r = rank_affine(s)
        checks.append(CheckResult(name=f"{name} full-rank", passed=r == t.n, detail=f"rank {r} of {t.n}"))
    for name, s in (("U", t.U), ("V", t.V)):
        count = len(periods(s, threads=threads))
        checks.append(CheckResult(name=f"{name} aperiodic", passed=count == 1, detail=f"|per| = {count}"))
    return checks


@dataclass(frozen=True, eq=False)
class SpanRestriction:
    """
    ⟨U⟩ 로 제한한 타일링.

    - basis / pivots: ⟨U⟩ 의 RREF 기저. ⟨U⟩ 의 원소 w 의 새 좌표는 w[pivots].
    - v_span: V ∩ ⟨U⟩ (원래 좌표)
    - tiling: 새 좌표에서의 (U, V ∩ ⟨U⟩), F_q^r 의 타일링
    """

    basis: np.ndarray
    pivots: list[int]
    v_span: VSet
    tiling: Tiling

    @property
    def rank(self) -> int:
        return len(self.pivots)


def restrict_to_span(t: Tiling) -> SpanRestriction:
    field = t.field
    R, pivots = row_reduce(field, t.U.coords)
    inside = in_span(field, R, pivots, t.V.coords)
    v_span = VSet(field, t.n, t.V.coords[inside].copy(), t.V.keys[inside].copy())
    r = len(pivots)
    if r == 0:
        raise ParameterError("U = {0} spans the zero space")
    sub = Tiling(
        field,
        r,
        VSet.from_rows(field, r, t.U.coords[:, pivots]),
        VSet.from_rows(field, r, v_span.coords[:, pivots]) if len(v_span) else VSet.empty(field, r),
        meta={**t.meta, "restricted_to_span": True},
    )
    return SpanRestriction(basis=R, pivots=pivots, v_span=v_span, tiling=sub)


__all__ = [
    "SurgeryPiece",
    "SpanRestriction",
    "Tiling",
    "construct_projective",
    "construct_semiprojective",
    "is_aperiodic",
    "is_full_rank",
    "is_projective",
    "kernel",
    "periods",
    "pieces_disjoint",
    "projective_pieces",
    "restrict_to_span",
    "semiprojective_pieces",
    "tiling_checklist",
    "v_map",
    "v_map_rows",
    "verify_tiling",
]
