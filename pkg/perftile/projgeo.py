# projgeo.py
"""
사영 기하 PG(n-1, q) / 아핀 기하 AG(n, q) 와 factorization

- 점 표현: 사영이면 정규화된 대표원 (첫 0 아닌 좌표 = 1), 아핀이면 벡터 그 자체.
- Factorization(𝒰, 𝒱): 서로소인 두 점 집합. 𝒰 ∪ 𝒱 바깥의 모든 점이 𝒰-𝒱 연결선
  정확히 하나 위에 있고, 연결선이 자기 양 끝 말고는 𝒰 ∪ 𝒱 의 점을 지나지 않으면 유효.
- exhaustive_search: 작은 기하에서 주어진 크기 (a, b) 의 factorization 을 전부 찾는다.
"""

from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence, Union

import numpy as np

from perftile.errors import (
    CeilingExceeded,
    CountingIdentityError,
    DimensionMismatch,
    InvalidFactorizationError,
    NotPeriodError,
    NotProjectiveError,
    ParameterError,
)
from perftile.gf import FieldSpec
from perftile.linalg import (
    FMatrix,
    FVec,
    VSet,
    all_vectors,
    in_span,
    inverse,
    keys_of,
    mat_vecs,
    normalize_rows,
    rank_linear,
    row_reduce,
)
from perftile.schemas.verdict import FactorizationVerdict
from perftile.settings import get_settings
from perftile.tiling import Tiling, is_projective
from perftile.utils.parallel import first_hit, ordered_map

GeometryKind = Literal["projective", "affine"]


# ----------------------------
# 1. 점
# ----------------------------

def _is_normalized(rows: np.ndarray) -> np.ndarray:
    nz = rows != 0
    has = np.any(nz, axis=1)
    lead = rows[np.arange(rows.shape[0]), np.argmax(nz, axis=1)]
    return has & (lead == 1)


@dataclass(frozen=True)
class PPoint:
    """PG(n-1, q) 의 점. rep 은 정규화된 대표원이어야 한다."""

    rep: FVec

    def __post_init__(self):
        if not _is_normalized(self.rep.as_array()[None, :])[0]:
            raise ParameterError(f"{list(self.rep.coords)} is not a normalized nonzero representative")

    @classmethod
    def of(cls, v: FVec) -> "PPoint":
        """아무 0 아닌 벡터 → 그 벡터가 생성하는 점."""
        row = normalize_rows(v.field, v.as_array()[None, :])[0]
        return cls(FVec(v.field, tuple(int(c) for c in row)))

    @property
    def field(self) -> FieldSpec:
        return self.rep.field

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def key(self) -> int:
        return self.rep.key


def point_set(field: FieldSpec, n: int, points: Iterable[Union[PPoint, FVec, Sequence[int]]]) -> VSet:
    """PPoint 들 → 대표원 VSet."""
    rows = []
    for p in points:
        v = p.rep if isinstance(p, PPoint) else p
        rows.append(v)
    return VSet.from_vectors(field, n, rows)


# ----------------------------
# 2. 기하
# ----------------------------

class _Geometry:
    """
    점 목록(key 순)과 연결선 내부 계산.

    점 목록과 interior_table 은 만든 뒤 바뀌지 않는다. 여러 스레드가 같이 읽어도 된다.
    """

    kind: GeometryKind

    def __init__(self, field: FieldSpec, n: int, points: VSet):
        self.field = field
        self.n = n
        self.points = points

    @property
    def point_count(self) -> int:
        return len(self.points)

    def interior_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """(M, n) 끝점 쌍 → (M, k, n) 연결선 내부 점들 (양 끝 제외)."""
        raise NotImplementedError

    def identity(self, a: int, b: int) -> tuple[int, int]:
        return counting_identity(self.kind, self.field.q, self.n, a, b)

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        idx = self.points.index_of_keys(keys_of(self.field, rows))
        if np.any(idx < 0):
            raise ParameterError(f"not a point of this {self.kind} geometry")
        return idx

    def interiors(self, ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
        """점 인덱스 쌍 → (M, k) 내부 점 인덱스."""
        ia = np.asarray(ia, dtype=np.int64)
        ib = np.asarray(ib, dtype=np.int64)
        rows = self.interior_rows(self.points.coords[ia], self.points.coords[ib])
        if rows.shape[1] == 0:
            return np.zeros((len(ia), 0), dtype=np.int64)
        return self.index_of(rows.reshape(-1, self.n)).reshape(rows.shape[:2])

    @functools.cached_property
    def interior_table(self) -> list[list[tuple[int, ...]]]:
        """모든 점 쌍의 내부 점 인덱스. 탐색 전용 (점이 적을 때만)."""
        P = self.point_count
        ia, ib = np.divmod(np.arange(P * P, dtype=np.int64), P)
        off = ia != ib
        table = [[() for _ in range(P)] for _ in range(P)]
        inner = self.interiors(ia[off], ib[off])
        for a, b, row in zip(ia[off].tolist(), ib[off].tolist(), inner.tolist()):
            table[a][b] = tuple(row)
        return table


class ProjectiveGeometry(_Geometry):
    """PG(n-1, q). 연결선 u-v 의 내부는 u + λv (λ ≠ 0) 를 정규화한 q-1 개 점."""

    kind: GeometryKind = "projective"

    def __init__(self, field: FieldSpec, n: int):
        if n < 1:
            raise ParameterError("projective geometry needs n >= 1")
        vecs = all_vectors(field, n)
        super().__init__(field, n, VSet.from_rows(field, n, vecs[_is_normalized(vecs)]))

    def interior_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        lam = self.field.nonzero()
        rows = self.field.add_array(a[:, None, :], self.field.mul_array(lam[None, :, None], b[:, None, :]))
        m, k, n = rows.shape
        return normalize_rows(self.field, rows.reshape(-1, n)).reshape(m, k, n)


class AffineGeometry(_Geometry):
    """AG(n, q). 점은 F_q^n 의 벡터, 연결선 a-b 의 내부는 a + t(b - a), t ∉ {0, 1}."""

    kind: GeometryKind = "affine"

    def __init__(self, field: FieldSpec, n: int):
        super().__init__(field, n, VSet.whole_space(field, n))

    def interior_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        t = self.field.elements()[2:]
        step = self.field.sub_array(b, a)
        return self.field.add_array(a[:, None, :], self.field.mul_array(t[None, :, None], step[:, None, :]))


def make_geometry(kind: GeometryKind, field: FieldSpec, n: int) -> _Geometry:
    if kind == "projective":
        return ProjectiveGeometry(field, n)
    if kind == "affine":
        return AffineGeometry(field, n)
    raise ParameterError(f"unknown geometry {kind!r}")


def counting_identity(kind: GeometryKind, q: int, n: int, a: int, b: int) -> tuple[int, int]:
    """
    (좌변, 우변).
      projective: a + b + a·b·(q-1)  vs  (q^n - 1)/(q - 1)
      affine:     a + b + a·b·(q-2)  vs  q^n
    """
    if kind == "projective":
        return a + b + a * b * (q - 1), (q ** n - 1) // (q - 1)
    if kind == "affine":
        return a + b + a * b * (q - 2), q ** n
    raise ParameterError(f"unknown geometry {kind!r}")


# ----------------------------
# 3. Factorization
# ----------------------------

@dataclass(frozen=True, eq=False)
class Factorization:
    """
    서로소인 점 집합 쌍 (𝒰, 𝒱). U / V 는 점 표현(사영이면 정규화 대표원)의 VSet.
    """

    kind: GeometryKind
    field: FieldSpec
    n: int
    U: VSet
    V: VSet
    meta: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        for name, s in (("U", self.U), ("V", self.V)):
            if s.field != self.field or s.n != self.n:
                raise DimensionMismatch(f"point set {name} lives in F_{s.field.q}^{s.n}")
            if self.kind == "projective" and len(s) and not np.all(_is_normalized(s.coords)):
                raise ParameterError(f"point set {name} contains a non-normalized representative")
        if not self.U.isdisjoint(self.V):
            raise InvalidFactorizationError("the two point sets of a factorization must be disjoint")

    def points_u(self) -> list[PPoint]:
        return [PPoint(v) for v in self.U]

    def points_v(self) -> list[PPoint]:
        return [PPoint(v) for v in self.V]

    def geometry(self) -> _Geometry:
        return make_geometry(self.kind, self.field, self.n)

    def same_as(self, other: "Factorization") -> bool:
        return (
            self.kind == other.kind
            and self.field == other.field
            and self.n == other.n
            and self.U == other.U
            and self.V == other.V
        )


def _rows(arr) -> list[list[int]]:
    return [[int(c) for c in r] for r in arr]


def verify_factorization(f: Factorization, geometry: Optional[_Geometry] = None) -> FactorizationVerdict:
    """
    바깥 점마다 지나는 𝒰-𝒱 연결선이 정확히 하나인지, 그리고 연결선이 𝒰 ∪ 𝒱 의 다른
    점을 지나지 않는지. 바깥 점이 없으면 degenerate 로 표시하고 valid.
    """
    geo = geometry or f.geometry()
    P = geo.point_count
    iu = geo.index_of(f.U.coords) if len(f.U) else np.zeros(0, dtype=np.int64)
    iv = geo.index_of(f.V.coords) if len(f.V) else np.zeros(0, dtype=np.int64)
    base = dict(
        geometry=f.kind,
        q=f.field.q,
        n=f.n,
        size_u=len(f.U),
        size_v=len(f.V),
        point_count=P,
    )

    in_tile = np.zeros(P, dtype=bool)
    in_tile[iu] = True
    in_tile[iv] = True
    outside = ~in_tile
    if not outside.any():
        return FactorizationVerdict(valid=True, reason="ok", degenerate=True, **base)

    pa, pb = np.meshgrid(iu, iv, indexing="ij")
    pa, pb = pa.ravel(), pb.ravel()
    inner = geo.interiors(pa, pb) if len(pa) else np.zeros((0, 0), dtype=np.int64)
    counts = np.bincount(inner.ravel(), minlength=P) if inner.size else np.zeros(P, dtype=np.int64)

    def lines_through(point: int) -> list[list[list[int]]]:
        hit = np.flatnonzero(np.any(inner == point, axis=1))[:2]
        pts = geo.points.coords
        return [[_rows([pts[pa[j]]])[0], _rows([pts[pb[j]]])[0]] for j in hit]

    bad = np.flatnonzero(outside & (counts != 1))
    if bad.size:
        w = int(bad[0])
        return FactorizationVerdict(
            valid=False,
            reason="uncovered" if counts[w] == 0 else "multiply_covered",
            witness=_rows([geo.points.coords[w]])[0],
            witness_count=int(counts[w]),
            witness_lines=lines_through(w) or None,
            **base,
        )

    hits = np.flatnonzero(in_tile & (counts > 0))
    if hits.size:
        w = int(hits[0])
        return FactorizationVerdict(
            valid=False,
            reason="line_hits_tile",
            witness=_rows([geo.points.coords[w]])[0],
            witness_count=int(counts[w]),
            witness_lines=lines_through(w),
            **base,
        )
    return FactorizationVerdict(valid=True, reason="ok", **base)


# ----------------------------
# 4. 타일링 <-> factorization
# ----------------------------

def _normalized_members(s: VSet) -> VSet:
    rows = s.coords[_is_normalized(s.coords)] if len(s) else s.coords
    return VSet.from_rows(s.field, s.n, rows) if len(rows) else VSet.empty(s.field, s.n)


def tiling_to_factorization(t: Tiling) -> Factorization:
    for name, s in (("U", t.U), ("V", t.V)):
        if not is_projective(s):
            raise NotProjectiveError(f"tile {name} is not projective")
    return Factorization(
        "projective",
        t.field,
        t.n,
        _normalized_members(t.U),
        _normalized_members(t.V),
        meta=dict(t.meta),
    )


def _cone(points: VSet) -> VSet:
    """점 대표원들 → 그 1차원 부분공간들의 합집합 ∪ {0}."""
    field, n = points.field, points.n
    if len(points) == 0:
        return VSet.zero(field, n)
    lam = field.elements()
    rows = field.mul_array(lam[:, None, None], points.coords[None, :, :]).reshape(-1, n)
    return VSet.from_rows(field, n, rows)


def factorization_to_tiling(f: Factorization) -> Tiling:
    if f.kind != "projective":
        raise ParameterError("only projective factorizations correspond to tilings")
    return Tiling(f.field, f.n, _cone(f.U), _cone(f.V), meta=dict(f.meta))


# ----------------------------
# 5. full-rank / period point
# ----------------------------

def full_rank_points(s: VSet) -> bool:
    """대표원들이 F_q^n 전체를 생성하는지."""
    if len(s) == 0:
        raise ParameterError("full-rank test needs a nonempty point set")
    return rank_linear(s) == s.n


def is_period_point(p: PPoint, s: VSet) -> bool:
    """p ∈ S 이고, S 의 다른 모든 점 s 에 대해 p-s 직선 전체가 S 안에 있는지."""
    field = s.field
    x = p.rep.as_array()
    if not s.contains_rows(x[None, :])[0]:
        return False
    others = s.coords[s.keys != p.key]
    if len(others) == 0:
        return True
    lam = field.nonzero()
    line = field.add_array(others[:, None, :], field.mul_array(lam[None, :, None], x[None, None, :]))
    line = normalize_rows(field, line.reshape(-1, s.n))
    return bool(np.all(s.contains_rows(line)))


# ----------------------------
# 6. 제한 / 몫
# ----------------------------

def _require_valid(f: Factorization) -> None:
    verdict = verify_factorization(f)
    if not verdict.valid:
        raise InvalidFactorizationError(f"input is not a factorization: {verdict.summary()}")


def restrict(f: Factorization, check: bool = True) -> Factorization:
    """
    (𝒰, ⟨⟨𝒰⟩⟩ ∩ 𝒱) 를 ⟨⟨𝒰⟩⟩ 의 기하로 옮긴다.

    ⟨𝒰⟩ 의 RREF 기저로 좌표를 다시 잡는다: 부분공간의 원소 w 의 새 좌표는 w[pivots].
    𝒰 가 full-rank 면 입력을 그대로 돌려준다.
    """
    if f.kind != "projective":
        raise ParameterError("restriction is defined for projective factorizations")
    if check:
        _require_valid(f)
    if len(f.U) == 0:
        raise ParameterError("cannot restrict to the span of an empty point set")
    R, pivots = row_reduce(f.field, f.U.coords)
    r = len(pivots)
    if r == f.n:
        return f
    field = f.field
    u_new = normalize_rows(field, f.U.coords[:, pivots])
    v_in = f.V.coords[in_span(field, R, pivots, f.V.coords)] if len(f.V) else f.V.coords
    v_new = normalize_rows(field, v_in[:, pivots]) if len(v_in) else np.zeros((0, r), dtype=field.dtype)
    return Factorization(
        "projective",
        field,
        r,
        VSet.from_rows(field, r, u_new),
        VSet.from_rows(field, r, v_new) if len(v_new) else VSet.empty(field, r),
        meta={**f.meta, "restricted_from": f.n},
    )


def quotient_basis(x: PPoint) -> np.ndarray:
    """x 의 대표원에 표준 기저 e_i 를 인덱스 순으로, 독립일 때만 덧붙인 기저 (행)."""
    field, n = x.field, x.n
    basis = [x.rep.as_array()]
    for i in range(n):
        if len(basis) == n:
            break
        e = np.zeros(n, dtype=field.dtype)
        e[i] = 1
        trial = np.stack(basis + [e])
        _, piv = row_reduce(field, trial)
        if len(piv) == len(trial):
            basis.append(e)
    return np.stack(basis)


def project_quotient(f: Factorization, x: PPoint, check: bool = True) -> Factorization:
    """
    (𝒰/x, 𝒱/x): x 를 지나는 직선들의 기하 G/x ≅ PG(n-2, q) 위의 factorization.

    x 로 시작하는 기저의 좌표에서 x-좌표를 버리고 정규화한다.
    """
    if f.kind != "projective":
        raise ParameterError("quotients are defined for projective factorizations")
    if x.field != f.field or x.n != f.n:
        raise DimensionMismatch("quotient point lives in a different space")
    if check:
        _require_valid(f)
    if not is_period_point(x, f.U):
        raise NotPeriodError(f"{list(x.rep.coords)} is not a period point of U")
    if f.n < 2:
        raise ParameterError("quotient of a 0-dimensional geometry")

    field = f.field
    basis = quotient_basis(x)
    to_coords = inverse(FMatrix(field, basis)).entries

    def image(points: VSet) -> VSet:
        rows = points.coords[points.keys != x.key] if len(points) else points.coords
        if len(rows) == 0:
            return VSet.empty(field, f.n - 1)
        # 행벡터 w 의 좌표 c 는 c·basis = w 를 푼 것, 즉 c = w·basis^{-1}
        c = mat_vecs(field, to_coords.T, rows)[:, 1:]
        return VSet.from_rows(field, f.n - 1, normalize_rows(field, c))

    return Factorization(
        "projective",
        field,
        f.n - 1,
        image(f.U),
        image(f.V),
        meta={**f.meta, "quotient_by": list(x.rep.coords)},
    )


# ----------------------------
# 7. 전수 탐색
# ----------------------------

_FREE, _IN_U, _IN_V, _OUT = 0, 1, 2, 3


class _Search:
    """
    점을 인덱스 순으로 𝒰 / 𝒱 / 바깥 중 하나로 정하는 backtracking.

    - cover[z]: z 를 지나는 연결선 수. 𝒰/𝒱 에 넣으려면 0 이어야 한다.
    - 새 점을 넣을 때 반대편 점들과의 연결선 내부가 이미 덮였거나 𝒰 ∪ 𝒱 에 있으면 실패.
    - |𝒰| = a, |𝒱| = b 가 되는 순간, counting identity 때문에 바깥 점은 정확히 한 번씩 덮여 있다.
    """

    def __init__(self, table, point_count: int, a: int, b: int, first_only: bool):
        self.table = table
        self.P = point_count
        self.a = a
        self.b = b
        self.first_only = first_only
        self.role = [_FREE] * point_count
        self.cover = [0] * point_count
        self.us: list[int] = []
        self.vs: list[int] = []
        self.solutions: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def _place(self, i: int, role: int) -> Optional[list[int]]:
        others = self.vs if role == _IN_U else self.us
        touched: list[int] = []
        row = self.table[i]
        for o in others:
            for z in row[o]:
                if self.role[z] in (_IN_U, _IN_V) or self.cover[z]:
                    for t in touched:
                        self.cover[t] -= 1
                    return None
                self.cover[z] += 1
                touched.append(z)
        self.role[i] = role
        (self.us if role == _IN_U else self.vs).append(i)
        return touched

    def _unplace(self, i: int, role: int, touched: list[int]) -> None:
        for t in touched:
            self.cover[t] -= 1
        self.role[i] = _FREE
        (self.us if role == _IN_U else self.vs).pop()

    def apply_prefix(self, prefix: Sequence[int]) -> bool:
        for i, role in enumerate(prefix):
            if role == _OUT:
                self.role[i] = _OUT
            elif self.cover[i] or self._place(i, role) is None:
                return False
        return True

    def run(self, start: int) -> None:
        self._step(start)

    def _done(self) -> bool:
        return self.first_only and bool(self.solutions)

    def _step(self, i: int) -> None:
        if len(self.us) == self.a and len(self.vs) == self.b:
            self.solutions.append((tuple(self.us), tuple(self.vs)))
            return
        need = (self.a - len(self.us)) + (self.b - len(self.vs))
        if i == self.P or self.P - i < need:
            return
        if self.cover[i] == 0:
            for role, have, cap in ((_IN_U, self.us, self.a), (_IN_V, self.vs, self.b)):
                if len(have) < cap:
                    touched = self._place(i, role)
                    if touched is not None:
                        self._step(i + 1)
                        self._unplace(i, role, touched)
                        if self._done():
                            return
        self.role[i] = _OUT
        self._step(i + 1)
        self.role[i] = _FREE


def _prefixes(depth: int, fix_first: bool) -> list[tuple[int, ...]]:
    roles = (_IN_U, _IN_V, _OUT)
    out: list[tuple[int, ...]] = [()]
    for level in range(depth):
        choices = (_IN_U,) if (fix_first and level == 0) else roles
        out = [p + (r,) for p in out for r in choices]
    return out


def exhaustive_search(
    kind: GeometryKind,
    field: FieldSpec,
    n: int,
    sizes: tuple[int, int],
    first_only: bool = False,
    max_points: Optional[int] = None,
    allow_large: bool = False,
    fix_first: bool = False,
    threads: Optional[int] = None,
) -> list[Factorization]:
    """
    크기 (a, b) 인 factorization 전부 (first_only 면 처음 하나).

    결과는 (𝒰 점 인덱스, 𝒱 점 인덱스) 사전순으로 정렬한다. first_only 면 깊이 우선 순서
    (점마다 𝒰, 𝒱, 바깥 순)로 처음 찾은 해 하나이고, 정렬 순서의 첫 해와 다를 수 있다.
    스레드 수와 상관없이 같은 해가 나온다. fix_first 면 인덱스 0 인 점을 𝒰 에 고정해서
    동형류 대표만 남긴다 (전체 목록이 아님).
    """
    a, b = sizes
    if a < 0 or b < 0:
        raise ParameterError("tile sizes must be nonnegative")
    lhs, rhs = counting_identity(kind, field.q, n, a, b)
    if lhs != rhs:
        inner = field.q - 1 if kind == "projective" else field.q - 2
        raise CountingIdentityError(
            f"counting identity fails: {a} + {b} + {a}·{b}·{inner} = {lhs} != {rhs}",
            lhs=lhs,
            rhs=rhs,
        )

    point_count = rhs
    ceiling = max_points if max_points is not None else get_settings().search_max_points
    if point_count > ceiling and not allow_large:
        raise CeilingExceeded(
            f"the geometry has {point_count} points, above the search ceiling {ceiling}; "
            f"pass --allow-large or --max-points to search anyway",
            required=point_count,
            ceiling=ceiling,
        )

    geo = make_geometry(kind, field, n)
    table = geo.interior_table
    P = geo.point_count

    depth = min(P, 2)
    prefixes = _prefixes(depth, fix_first)

    def explore(prefix: tuple[int, ...]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        s = _Search(table, P, a, b, first_only)
        if not s.apply_prefix(prefix):
            return []
        if len(s.us) > a or len(s.vs) > b:
            return []
        s.run(len(prefix))
        return s.solutions

    if first_only:
        hit = first_hit(lambda prefix: explore(prefix) or None, prefixes, threads)
        raw = hit[:1] if hit else []
    else:
        raw = [sol for part in ordered_map(explore, prefixes, threads) for sol in part]
        raw.sort()

    pts = geo.points.coords
    out = []
    for us, vs in raw:
        u = VSet.from_rows(field, n, pts[list(us)]) if us else VSet.empty(field, n)
        v = VSet.from_rows(field, n, pts[list(vs)]) if vs else VSet.empty(field, n)
        out.append(Factorization(kind, field, n, u, v, meta={"search": [a, b]}))
    return out


__all__ = [
    "AffineGeometry",
    "Factorization",
    "GeometryKind",
    "PPoint",
    "ProjectiveGeometry",
    "counting_identity",
    "exhaustive_search",
    "factorization_to_tiling",
    "full_rank_points",
    "is_period_point",
    "make_geometry",
    "point_set",
    "project_quotient",
    "quotient_basis",
    "restrict",
    "tiling_to_factorization",
    "verify_factorization",
]
