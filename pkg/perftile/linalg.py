# linalg.py
"""
F_q^n 위의 벡터 / 벡터 집합 / 행렬, 그리고 가우스 소거

저장 방식:
- 벡터 집합(VSet)은 (M, n) 좌표 배열 + 정렬된 key 배열 두 개로 들고 다닌다.
- key(v) = Σ coords[i] · q^i (0번 좌표가 최하위). q^n <= 2^63 이면 int64 (keyed mode),
  아니면 파이썬 int 를 담은 object 배열로 fallback 한다.
- 좌표 dtype 은 FieldSpec.dtype (q <= 256 이면 uint8).
- VSet 은 만든 뒤 읽기 전용이다. 여러 검증 worker 가 공유해도 된다.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from perftile.errors import ConstructionError, DimensionMismatch, FieldError, ParameterError
from perftile.gf import FieldSpec


KEY_LIMIT = 2**63

# 브로드캐스팅 임시 배열 하나의 최대 원소 수
CHUNK_ELEMENTS = 1 << 22


def is_keyed(field: FieldSpec, n: int) -> bool:
    return field.q ** n <= KEY_LIMIT


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ----------------------------
# 0. key <-> 좌표
# ----------------------------

def keys_of(field: FieldSpec, coords: np.ndarray) -> np.ndarray:
    """(M, n) 좌표 배열 → key 배열. 마지막 축이 좌표 축이면 임의 shape 도 받는다."""
    coords = np.asarray(coords)
    n = coords.shape[-1]
    q = field.q
    if is_keyed(field, n):
        key = np.zeros(coords.shape[:-1], dtype=np.int64)
        for i in range(n - 1, -1, -1):
            key *= q
            key += coords[..., i]
        return key
    key = np.zeros(coords.shape[:-1], dtype=object)
    for i in range(n - 1, -1, -1):
        key = key * q + coords[..., i].astype(object)
    return key


def coords_of(field: FieldSpec, n: int, keys) -> np.ndarray:
    """key 배열 → (M, n) 좌표 배열."""
    keys = np.asarray(keys, dtype=np.int64 if is_keyed(field, n) else object)
    out = np.empty(keys.shape + (n,), dtype=field.dtype)
    rest = keys.copy()
    for i in range(n):
        out[..., i] = (rest % field.q).astype(field.dtype)
        rest = rest // field.q
    return out


def all_vectors(field: FieldSpec, n: int) -> np.ndarray:
    """F_q^n 전체를 key 순서로. 작은 공간 전용."""
    size = field.q ** n
    return coords_of(field, n, np.arange(size, dtype=np.int64))


def iter_row_chunks(total: int, width: int, budget: int = CHUNK_ELEMENTS) -> Iterator[slice]:
    """total 개의 행을, 행 하나가 width 개 원소를 만든다고 보고 budget 에 맞게 자른다."""
    step = max(1, budget // max(1, width))
    for start in range(0, total, step):
        yield slice(start, min(total, start + step))


# ----------------------------
# 1. FVec
# ----------------------------

@dataclass(frozen=True)
class FVec:
    """F_q^n 의 벡터 하나 (불변 값)."""

    field: FieldSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        q = self.field.q
        for c in coords:
            if not (0 <= c < q):
                raise FieldError(f"coordinate {c} out of range [0, {q})")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> "FVec":
        return cls(field, (0,) * n)

    @classmethod
    def unit(cls, field: FieldSpec, n: int, i: int, value: int = 1) -> "FVec":
        coords = [0] * n
        coords[i] = value
        return cls(field, tuple(coords))

    @classmethod
    def from_key(cls, field: FieldSpec, n: int, key: int) -> "FVec":
        coords = []
        rest = int(key)
        for _ in range(n):
            coords.append(rest % field.q)
            rest //= field.q
        if rest:
            raise FieldError(f"key {key} out of range for F_{field.q}^{n}")
        return cls(field, tuple(coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def key(self) -> int:
        key = 0
        for c in reversed(self.coords):
            key = key * self.field.q + c
        return key

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=self.field.dtype)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _same_space(self, other: "FVec") -> None:
        if other.field != self.field or other.n != self.n:
            raise DimensionMismatch("vectors from different spaces")

    def __add__(self, other: "FVec") -> "FVec":
        self._same_space(other)
        return FVec(self.field, tuple(self.field.add_array(self.as_array(), other.as_array())))

    def __sub__(self, other: "FVec") -> "FVec":
        self._same_space(other)
        return FVec(self.field, tuple(self.field.sub_array(self.as_array(), other.as_array())))

    def __neg__(self) -> "FVec":
        return FVec(self.field, tuple(self.field.neg_array(self.as_array())))

    def scale(self, lam: int) -> "FVec":
        return FVec(self.field, tuple(self.field.scale_array(lam, self.as_array())))

    def __repr__(self) -> str:
        return f"FVec(F_{self.field.q}, {self.coords})"


VectorLike = Union[FVec, Sequence[int]]


def _as_row(field: FieldSpec, n: int, v: VectorLike) -> np.ndarray:
    if isinstance(v, FVec):
        if v.field != field:
            raise DimensionMismatch(f"vector over F_{v.field.q} used in F_{field.q}^{n}")
        coords = v.coords
    else:
        coords = tuple(int(c) for c in v)
    if len(coords) != n:
        raise DimensionMismatch(f"vector of length {len(coords)} used in F_{field.q}^{n}")
    for c in coords:
        if not (0 <= c < field.q):
            raise FieldError(f"coordinate {c} out of range [0, {field.q})")
    return np.asarray(coords, dtype=field.dtype)


# ----------------------------
# 2. VSet
# ----------------------------

class VSet:
    """
    F_q^n 의 부분집합. 중복 없음, key 오름차순 정렬.

    coords / keys 는 읽기 전용 numpy 배열이다.
    """

    __slots__ = ("field", "n", "coords", "keys")

    def __init__(self, field: FieldSpec, n: int, coords: np.ndarray, keys: np.ndarray):
        # 내부 생성자. 정렬/중복제거가 끝난 배열만 받는다. 밖에서는 from_* 를 쓴다.
        self.field = field
        self.n = n
        self.coords = _readonly(coords)
        self.keys = _readonly(keys)

    # ---- 생성 ----

    @classmethod
    def from_rows(cls, field: FieldSpec, n: int, rows) -> "VSet":
        rows = np.asarray(rows)
        if rows.size == 0:
            return cls.empty(field, n)
        if rows.ndim != 2 or rows.shape[1] != n:
            raise DimensionMismatch(f"rows of shape {rows.shape} used in F_{field.q}^{n}")
        if rows.min() < 0 or rows.max() >= field.q:
            raise FieldError(f"coordinates out of range [0, {field.q})")
        rows = rows.astype(field.dtype, copy=False)
        keys = keys_of(field, rows)
        uniq, first = np.unique(keys, return_index=True)
        return cls(field, n, np.ascontiguousarray(rows[first]), uniq)

    @classmethod
    def from_vectors(cls, field: FieldSpec, n: int, vectors: Iterable[VectorLike]) -> "VSet":
        rows = [_as_row(field, n, v) for v in vectors]
        if not rows:
            return cls.empty(field, n)
        return cls.from_rows(field, n, np.stack(rows))

    @classmethod
    def from_keys(cls, field: FieldSpec, n: int, keys) -> "VSet":
        keys = np.unique(np.asarray(keys, dtype=np.int64 if is_keyed(field, n) else object))
        return cls(field, n, coords_of(field, n, keys), keys)

    @classmethod
    def empty(cls, field: FieldSpec, n: int) -> "VSet":
        dtype = np.int64 if is_keyed(field, n) else object
        return cls(field, n, np.zeros((0, n), dtype=field.dtype), np.zeros(0, dtype=dtype))

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> "VSet":
        return cls.from_rows(field, n, np.zeros((1, n), dtype=field.dtype))

    @classmethod
    def whole_space(cls, field: FieldSpec, n: int) -> "VSet":
        keys = np.arange(field.q ** n, dtype=np.int64)
        return cls(field, n, coords_of(field, n, keys), keys)

    # ---- 조회 ----

    def __len__(self) -> int:
        return int(self.keys.shape[0])

    @property
    def size(self) -> int:
        return len(self)

    def __iter__(self) -> Iterator[FVec]:
        for row in self.coords:
            yield FVec(self.field, tuple(int(c) for c in row))

    def members(self) -> list[FVec]:
        return list(self)

    def contains_keys(self, keys) -> np.ndarray:
        """key 배열의 각 원소가 이 집합에 있는지 (bool 배열)."""
        keys = np.asarray(keys)
        if len(self) == 0:
            return np.zeros(keys.shape, dtype=bool)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, len(self) - 1)
        return self.keys[idx] == keys

    def contains_rows(self, rows) -> np.ndarray:
        return self.contains_keys(keys_of(self.field, np.asarray(rows)))

    def __contains__(self, v: VectorLike) -> bool:
        row = _as_row(self.field, self.n, v)
        return bool(self.contains_rows(row[None, :])[0])

    def index_of_keys(self, keys) -> np.ndarray:
        """각 key 의 위치. 없는 key 는 -1."""
        keys = np.asarray(keys)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, max(len(self) - 1, 0))
        found = self.contains_keys(keys)
        return np.where(found, idx, -1)

    @property
    def has_zero(self) -> bool:
        return len(self) > 0 and self.keys[0] == 0

    def min_member(self) -> FVec:
        if len(self) == 0:
            raise ParameterError("empty set has no smallest member")
        return FVec(self.field, tuple(int(c) for c in self.coords[0]))

    def same_space(self, other: "VSet") -> bool:
        return self.field == other.field and self.n == other.n

    def _require_same_space(self, other: "VSet") -> None:
        if not self.same_space(other):
            raise DimensionMismatch(
                f"sets live in different spaces: F_{self.field.q}^{self.n} vs F_{other.field.q}^{other.n}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, VSet):
            return NotImplemented
        return self.same_space(other) and len(self) == len(other) and bool(np.all(self.keys == other.keys))

    __hash__ = None

    def __repr__(self) -> str:
        return f"VSet(F_{self.field.q}^{self.n}, size={len(self)})"

    # ---- 변환 ----

    def translate(self, t: VectorLike) -> "VSet":
        row = _as_row(self.field, self.n, t)
        return VSet.from_rows(self.field, self.n, self.field.add_array(self.coords, row[None, :]))

    def scale(self, lam: int) -> "VSet":
        return VSet.from_rows(self.field, self.n, self.field.scale_array(lam, self.coords))

    def union(self, other: "VSet") -> "VSet":
        self._require_same_space(other)
        return VSet.from_rows(self.field, self.n, np.concatenate([self.coords, other.coords]))

    def difference(self, other: "VSet") -> "VSet":
        self._require_same_space(other)
        keep = ~other.contains_keys(self.keys)
        return VSet(self.field, self.n, self.coords[keep].copy(), self.keys[keep].copy())

    def intersection(self, other: "VSet") -> "VSet":
        self._require_same_space(other)
        keep = other.contains_keys(self.keys)
        return VSet(self.field, self.n, self.coords[keep].copy(), self.keys[keep].copy())

    def isdisjoint(self, other: "VSet") -> bool:
        self._require_same_space(other)
        return not bool(np.any(other.contains_keys(self.keys)))


def sumset(a: VSet, b: VSet, strict: bool = False) -> VSet:
    """
    Minkowski 합 a + b = {x + y}.

    strict=True 이면 모든 합이 서로 달라야 한다 (|a+b| = |a|·|b|). 아니면 ConstructionError.
    """
    a._require_same_space(b)
    field = a.field
    if len(a) == 0 or len(b) == 0:
        return VSet.empty(field, a.n)
    parts = []
    for sl in iter_row_chunks(len(a), len(b) * a.n):
        s = field.add_array(a.coords[sl, None, :], b.coords[None, :, :])
        parts.append(s.reshape(-1, a.n))
    result = VSet.from_rows(field, a.n, np.concatenate(parts))
    if strict and len(result) != len(a) * len(b):
        raise ConstructionError(
            f"Minkowski sum is not direct: |A|·|B| = {len(a) * len(b)} but |A+B| = {len(result)}"
        )
    return result


# ----------------------------
# 3. FMatrix
# ----------------------------

@dataclass(frozen=True, eq=False)
class FMatrix:
    """F_q 위의 r × c 행렬."""

    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self):
        ent = np.array(self.entries, dtype=np.int64, ndmin=2)
        if ent.ndim != 2:
            raise DimensionMismatch("matrix entries must be two-dimensional")
        if ent.size and (ent.min() < 0 or ent.max() >= self.field.q):
            raise FieldError(f"matrix entries out of range [0, {self.field.q})")
        object.__setattr__(self, "entries", _readonly(ent.astype(self.field.dtype)))

    @classmethod
    def from_columns(cls, field: FieldSpec, n: int, columns: Sequence[VectorLike]) -> "FMatrix":
        if not columns:
            return cls(field, np.zeros((n, 0), dtype=field.dtype))
        return cls(field, np.stack([_as_row(field, n, c) for c in columns], axis=1))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "FMatrix":
        return cls(field, np.eye(n, dtype=field.dtype))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "FMatrix":
        return cls(field, np.zeros((rows, cols), dtype=field.dtype))

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    def column(self, j: int) -> FVec:
        return FVec(self.field, tuple(int(c) for c in self.entries[:, j]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.entries.shape == other.entries.shape
            and bool(np.all(self.entries == other.entries))
        )

    __hash__ = None


# ----------------------------
# 4. 가우스 소거
# ----------------------------

def row_reduce(field: FieldSpec, matrix, pivot_cols: Optional[int] = None) -> tuple[np.ndarray, list[int]]:
    """
    Reduced row-echelon form 과 pivot 열 목록.

    - pivot 은 가장 작은 인덱스의 0 아닌 열, 행은 입력 순서대로 본다.
    - pivot_cols 가 주어지면 앞의 pivot_cols 개 열에서만 pivot 을 찾는다 (첨가행렬용).
    - 반환하는 R 은 rank 개 행만 담는다.
    """
    R = np.array(matrix, dtype=field.dtype, ndmin=2).copy()
    if R.size == 0:
        return R.reshape(0, R.shape[1] if R.ndim == 2 else 0), []
    n_rows, n_cols = R.shape
    limit = n_cols if pivot_cols is None else pivot_cols
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        if r == n_rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = field.scale_array(field.inv(lead), R[r])
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            R[hit] = field.sub_array(R[hit], field.mul_array(col[hit][:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R[:r], pivots


def combine(field: FieldSpec, coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """(m, d) 계수 × (d, n) 기저 → (m, n) 선형결합."""
    coeffs = np.asarray(coeffs, dtype=field.dtype)
    basis = np.asarray(basis, dtype=field.dtype)
    out = np.zeros((coeffs.shape[0], basis.shape[1]), dtype=field.dtype)
    for i in range(basis.shape[0]):
        out = field.add_array(out, field.mul_array(coeffs[:, i : i + 1], basis[i][None, :]))
    return out


def rank_linear(s: VSet) -> int:
    """선형 span 의 차원."""
    if len(s) == 0:
        return 0
    _, pivots = row_reduce(s.field, s.coords)
    return len(pivots)


def affine_differences(s: VSet) -> np.ndarray:
    """{s - s0}, s0 = key 가 가장 작은 원소."""
    if len(s) == 0:
        raise ParameterError("affine rank of an empty set is undefined")
    return s.field.sub_array(s.coords, s.coords[0][None, :])


def rank_affine(s: VSet) -> int:
    """affine span 의 차원."""
    _, pivots = row_reduce(s.field, affine_differences(s))
    return len(pivots)


def is_full_rank(s: VSet) -> bool:
    return len(s) > 0 and rank_affine(s) == s.n


def span_basis(s: VSet) -> list[FVec]:
    """선형 span 의 RREF 기저."""
    if len(s) == 0:
        return []
    R, _ = row_reduce(s.field, s.coords)
    return [FVec(s.field, tuple(int(c) for c in row)) for row in R]


def in_span(field: FieldSpec, basis_rref: np.ndarray, pivots: Sequence[int], rows) -> np.ndarray:
    """RREF 기저가 생성하는 부분공간에 각 행이 들어있는지."""
    rows = np.asarray(rows, dtype=field.dtype)
    if len(pivots) == 0:
        return ~np.any(rows, axis=1)
    recon = combine(field, rows[:, list(pivots)], basis_rref)
    return np.all(recon == rows, axis=1)


def span_members(field: FieldSpec, n: int, basis, scalars: Optional[np.ndarray] = None) -> VSet:
    """
    기저의 모든 선형결합. scalars 를 주면 그 계수 집합만 쓴다 (F_p-span 등).
    """
    if scalars is None:
        scalars = field.elements()
    scalars = np.asarray(scalars, dtype=field.dtype)
    members = np.zeros((1, n), dtype=field.dtype)
    for b in basis:
        row = _as_row(field, n, b) if not isinstance(b, np.ndarray) else b.astype(field.dtype)
        multiples = field.mul_array(scalars[:, None], row[None, :])
        members = field.add_array(members[:, None, :], multiples[None, :, :]).reshape(-1, n)
    return VSet.from_rows(field, n, members)


# ----------------------------
# 5. 행렬-벡터 / 연립방정식
# ----------------------------

def mat_vecs(field: FieldSpec, h: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """
    (r, c) 행렬 h 와 (m, c) 행 벡터들 xs → (m, r) 결과 Hx 들.

    소수체는 int64 matmul 후 mod p, 확대체는 테이블/자릿수 산술로 열 단위 누적.
    """
    h = np.asarray(h)
    xs = np.asarray(xs)
    if xs.shape[-1] != h.shape[1]:
        raise DimensionMismatch(f"matrix has {h.shape[1]} columns but vectors have length {xs.shape[-1]}")
    if field.is_prime_field:
        out = (xs.astype(np.int64) @ h.T.astype(np.int64)) % field.p
        return out.astype(field.dtype)
    out = np.zeros((xs.shape[0], h.shape[0]), dtype=field.dtype)
    for j in range(h.shape[1]):
        out = field.add_array(out, field.mul_array(xs[:, j : j + 1], h[:, j][None, :]))
    return out


def mat_vec(h: FMatrix, x: VectorLike) -> FVec:
    row = _as_row(h.field, h.cols, x)
    out = mat_vecs(h.field, h.entries, row[None, :])[0]
    return FVec(h.field, tuple(int(c) for c in out))


@dataclass(frozen=True)
class Solution:
    """
    Hx = target 의 해집합.

    consistent=False 이면 해가 없다 (particular is None). 그 외에는
    particular + span(kernel_basis) 가 해집합 전체.
    """

    consistent: bool
    particular: Optional[FVec]
    kernel_basis: tuple[FVec, ...]

    @property
    def nullity(self) -> int:
        return len(self.kernel_basis)

    def size(self, q: int) -> int:
        return q ** self.nullity if self.consistent else 0


def solve(h: FMatrix, target: VectorLike) -> Solution:
    field = h.field
    t = _as_row(field, h.rows, target)
    aug = np.concatenate([h.entries, t[:, None]], axis=1)
    R, pivots = row_reduce(field, aug, pivot_cols=h.cols)

    # [0 ... 0 | nonzero] 꼴 행이 생기면 해가 없다. (pivot 열을 h.cols 로 제한했으므로
    # 그런 행은 R 에 남지 않고, 대신 rank 비교로 판정한다)
    _, full_piv = row_reduce(field, aug)
    if len(full_piv) > len(pivots):
        return Solution(consistent=False, particular=None, kernel_basis=())

    c = h.cols
    particular = np.zeros(c, dtype=field.dtype)
    for r, pc in enumerate(pivots):
        particular[pc] = R[r, c]

    free = [j for j in range(c) if j not in set(pivots)]
    basis = []
    for f_col in free:
        vec = np.zeros(c, dtype=field.dtype)
        vec[f_col] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = field.neg(int(R[r, f_col]))
        basis.append(FVec(field, tuple(int(x) for x in vec)))

    return Solution(
        consistent=True,
        particular=FVec(field, tuple(int(x) for x in particular)),
        kernel_basis=tuple(basis),
    )


def inverse(h: FMatrix) -> FMatrix:
    """정사각 가역 행렬의 역행렬."""
    field = h.field
    if h.rows != h.cols:
        raise DimensionMismatch(f"cannot invert a {h.rows}x{h.cols} matrix")
    n = h.rows
    aug = np.concatenate([h.entries, np.eye(n, dtype=field.dtype)], axis=1)
    R, pivots = row_reduce(field, aug, pivot_cols=n)
    if len(pivots) < n:
        raise ParameterError("matrix is singular")
    return FMatrix(field, R[:, n:])


def normalize_rows(field: FieldSpec, rows) -> np.ndarray:
    """
    각 행을 첫 번째 0 아닌 좌표가 1 이 되도록 스칼라배한다. (projective 대표원)

    0 행이 있으면 ParameterError.
    """
    rows = np.asarray(rows, dtype=field.dtype)
    if rows.shape[0] == 0:
        return rows.copy()
    nz = rows != 0
    if not np.all(np.any(nz, axis=1)):
        raise ParameterError("the zero vector has no projective representative")
    lead_idx = np.argmax(nz, axis=1)
    lead = rows[np.arange(rows.shape[0]), lead_idx]
    inv = field.inv_array(lead)
    return field.mul_array(inv[:, None], rows)
