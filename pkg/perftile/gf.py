# gf.py
"""
유한체 F_q (q = p^k) 산술

원소 인코딩:
- 원소는 [0, q) 정수 e 하나로 표현한다.
- e = Σ a_i p^i 의 base-p 자릿수 (a_0, ..., a_{k-1}) 가 다항식 대표원의 계수 (낮은 차수부터).
- 0 은 영원소, 1 은 곱셈 항등원.

구현 방식:
- q <= table_limit (기본 256) 이면 add/mul/neg/inv 테이블을 미리 만든다.
  → 벡터 연산은 전부 numpy fancy indexing 한 번.
- 그보다 크면:
  - k == 1: mod p 정수 산술
  - k > 1 : base-p 자릿수 배열로 다항식 곱셈 후 modulus 로 나머지
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from perftile.errors import FieldDivisionError, FieldError
from perftile.settings import get_settings


# ----------------------------
# 0. 정수 / 다항식 유틸 (F_p[x], 계수 리스트는 낮은 차수부터)
# ----------------------------

def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _poly_trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """a mod b over F_p. b는 monic 이라고 가정한다."""
    r = [c % p for c in a]
    db = len(b) - 1
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c == 0:
            continue
        shift = i - db
        for j in range(db + 1):
            r[shift + j] = (r[shift + j] - c * b[j]) % p
    return _poly_trim(r[:db] if db > 0 else [0])


def _monic_polys(p: int, degree: int) -> Iterable[tuple[int, ...]]:
    """차수 degree 인 monic 다항식 전부. (a_0, ..., a_{d-1}) 사전순."""
    for low in itertools.product(range(p), repeat=degree):
        yield tuple(low) + (1,)


def is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    """
    F_p 위에서 modulus(낮은 차수부터, monic) 가 기약인지 trial division 으로 판정한다.

    차수 k/2 이하의 monic 인수가 없으면 기약.
    """
    k = len(modulus) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if modulus[0] % p == 0:
        # x 가 인수
        return False
    for d in range(1, k // 2 + 1):
        for divisor in _monic_polys(p, d):
            rem = _poly_mod(modulus, divisor, p)
            if all(c == 0 for c in rem):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """
    차수 k 의 monic 기약다항식 중 (a_0, ..., a_{k-1}) 사전순 최소인 것.

    재현성을 위해 결정적으로 고른다.
    """
    for low in itertools.product(range(p), repeat=k):
        cand = tuple(low) + (1,)
        if is_irreducible(p, cand):
            return cand
    # 유한체 존재 정리상 도달 불가
    raise FieldError(f"internal error: no irreducible polynomial of degree {k} over F_{p}")


# ----------------------------
# 1. FieldSpec
# ----------------------------

@dataclass(frozen=True)
class FieldSpec:
    """
    유한체 F_q 하나. 생성 후 불변이므로 여러 worker 가 공유해도 된다.

    - p: 표수 (소수)
    - k: 확대 차수 (>= 1)
    - modulus: k > 1 일 때만 존재. 낮은 차수부터의 계수, 길이 k+1, monic.
    """

    p: int
    k: int = 1
    modulus: Optional[tuple[int, ...]] = None
    table_limit: int = field(default=256, compare=False, repr=False)

    q: int = field(init=False, compare=False)
    _add: Optional[np.ndarray] = field(init=False, default=None, compare=False, repr=False)
    _mul: Optional[np.ndarray] = field(init=False, default=None, compare=False, repr=False)
    _neg: Optional[np.ndarray] = field(init=False, default=None, compare=False, repr=False)
    _inv: Optional[np.ndarray] = field(init=False, default=None, compare=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"characteristic p={self.p} is not prime")
        if self.k < 1:
            raise FieldError(f"extension degree k={self.k} must be >= 1")
        if self.k == 1:
            if self.modulus is not None:
                raise FieldError("prime fields carry no modulus")
        else:
            if self.modulus is None:
                raise FieldError("extension fields need a modulus; use field_new()")
            mod = tuple(int(c) for c in self.modulus)
            if len(mod) != self.k + 1 or mod[-1] != 1:
                raise FieldError(f"modulus {list(mod)} must be monic of degree {self.k}")
            if any(not (0 <= c < self.p) for c in mod):
                raise FieldError(f"modulus coefficients must lie in [0, {self.p})")
            if not is_irreducible(self.p, mod):
                raise FieldError(f"modulus {list(mod)} is reducible over F_{self.p}")
            object.__setattr__(self, "modulus", mod)

        object.__setattr__(self, "q", self.p ** self.k)
        if self.q <= self.table_limit:
            self._build_tables()

    # ---- 기본 정보 ----

    @property
    def dtype(self) -> type:
        """좌표 저장용 dtype. q <= 256 이면 uint8, 아니면 uint16."""
        return np.uint8 if self.q <= 256 else np.uint16

    @property
    def has_tables(self) -> bool:
        return self._mul is not None

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=self.dtype)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.q, dtype=self.dtype)

    def prime_subfield(self) -> np.ndarray:
        """F_p ⊆ F_q. 인코딩상 0..p-1 이 곧 상수 다항식들."""
        return np.arange(self.p, dtype=self.dtype)

    def describe(self) -> str:
        if self.k == 1:
            return f"F_{self.q}"
        terms = []
        for i in range(self.k, -1, -1):
            c = self.modulus[i]
            if c == 0:
                continue
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if i == 0:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return f"F_{self.q} ({' + '.join(terms)})"

    # ---- 테이블 ----

    def _build_tables(self) -> None:
        q = self.q
        a = np.repeat(np.arange(q, dtype=np.int64), q)
        b = np.tile(np.arange(q, dtype=np.int64), q)
        add = self._raw_add(a, b).reshape(q, q).astype(self.dtype)
        mul = self._raw_mul(a, b).reshape(q, q).astype(self.dtype)
        neg = self._raw_neg(np.arange(q, dtype=np.int64)).astype(self.dtype)

        inv = np.zeros(q, dtype=self.dtype)
        ones = np.argwhere(mul[1:, 1:] == 1)
        inv[ones[:, 0] + 1] = ones[:, 1] + 1

        for name, table in (("_add", add), ("_mul", mul), ("_neg", neg), ("_inv", inv)):
            table.setflags(write=False)
            object.__setattr__(self, name, table)

    # ---- 테이블 없이 계산하는 원시 연산 (int64 배열) ----

    def _digits(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        out = np.empty(arr.shape + (self.k,), dtype=np.int64)
        rest = arr.copy()
        for i in range(self.k):
            out[..., i] = rest % self.p
            rest //= self.p
        return out

    def _undigits(self, digits: np.ndarray) -> np.ndarray:
        out = np.zeros(digits.shape[:-1], dtype=np.int64)
        for i in range(self.k - 1, -1, -1):
            out = out * self.p + digits[..., i]
        return out

    def _raw_add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        return self._undigits((self._digits(a) + self._digits(b)) % self.p)

    def _raw_neg(self, a: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self._undigits((-self._digits(a)) % self.p)

    def _raw_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        p, k = self.p, self.k
        if k == 1:
            return (np.asarray(a, dtype=np.int64) * b) % p
        da, db = np.broadcast_arrays(self._digits(a), self._digits(b))
        prod = np.zeros(da.shape[:-1] + (2 * k - 1,), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[..., i + j] += da[..., i] * db[..., j]
        prod %= p
        # x^k = -(m_0 + m_1 x + ... + m_{k-1} x^{k-1})
        for top in range(2 * k - 2, k - 1, -1):
            c = prod[..., top].copy()
            for t in range(k):
                prod[..., top - k + t] = (prod[..., top - k + t] - c * self.modulus[t]) % p
            prod[..., top] = 0
        return self._undigits(prod[..., :k])

    def _raw_pow(self, a: np.ndarray, e: int) -> np.ndarray:
        result = np.ones(np.shape(a), dtype=np.int64)
        base = np.asarray(a, dtype=np.int64)
        while e > 0:
            if e & 1:
                result = self._raw_mul(result, base)
            base = self._raw_mul(base, base)
            e >>= 1
        return result

    # ---- 배열 연산 (linalg 가 쓰는 경로) ----

    def add_array(self, a, b) -> np.ndarray:
        if self._add is not None:
            return self._add[a, b]
        return self._raw_add(a, b).astype(self.dtype)

    def neg_array(self, a) -> np.ndarray:
        if self._neg is not None:
            return self._neg[a]
        return self._raw_neg(a).astype(self.dtype)

    def sub_array(self, a, b) -> np.ndarray:
        return self.add_array(a, self.neg_array(b))

    def mul_array(self, a, b) -> np.ndarray:
        if self._mul is not None:
            return self._mul[a, b]
        return self._raw_mul(a, b).astype(self.dtype)

    def inv_array(self, a) -> np.ndarray:
        arr = np.asarray(a)
        if np.any(arr == 0):
            raise FieldDivisionError("division by zero in F_%d" % self.q)
        if self._inv is not None:
            return self._inv[arr]
        return self._raw_pow(arr, self.q - 2).astype(self.dtype)

    def scale_array(self, lam: int, arr) -> np.ndarray:
        """스칼라 lam 을 배열 전체에 곱한다."""
        return self.mul_array(np.asarray(lam, dtype=self.dtype), arr)

    # ---- 스칼라 연산 ----

    def _check(self, a: int) -> int:
        a = int(a)
        if not (0 <= a < self.q):
            raise FieldError(f"element {a} out of range [0, {self.q})")
        return a

    def add(self, a: int, b: int) -> int:
        return int(self.add_array(self._check(a), self._check(b)))

    def neg(self, a: int) -> int:
        return int(self.neg_array(self._check(a)))

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_array(self._check(a), self._check(b)))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_array(self._check(a), self._check(b)))

    def inv(self, a: int) -> int:
        a = self._check(a)
        if a == 0:
            raise FieldDivisionError(f"inverse of 0 in {self.describe()}")
        return int(self.inv_array(np.asarray(a)))

    def div(self, a: int, b: int) -> int:
        b = self._check(b)
        if b == 0:
            raise FieldDivisionError(f"division by zero in {self.describe()}")
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        a = self._check(a)
        if e < 0:
            return self.pow(self.inv(a), -e)
        return int(self._raw_pow(np.asarray(a), e))

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)


# ----------------------------
# 2. 생성 진입점
# ----------------------------

def _check_ceiling(q: int, ceiling: Optional[int]) -> None:
    limit = ceiling if ceiling is not None else get_settings().field_ceiling
    if q > limit:
        raise FieldError(f"field order {q} exceeds ceiling {limit} (set PERFTILE_FIELD_CEILING)")


def field_new(p: int, k: int = 1, ceiling: Optional[int] = None) -> FieldSpec:
    """
    F_{p^k} 를 만든다. k > 1 이면 사전순 최소 monic 기약다항식을 modulus 로 쓴다.
    """
    if not is_prime(p):
        raise FieldError(f"characteristic p={p} is not prime")
    if k < 1:
        raise FieldError(f"extension degree k={k} must be >= 1")
    _check_ceiling(p ** k, ceiling)
    limit = get_settings().table_limit
    if k == 1:
        return FieldSpec(p=p, k=1, table_limit=limit)
    return FieldSpec(p=p, k=k, modulus=smallest_irreducible(p, k), table_limit=limit)


def field_with_modulus(p: int, modulus: Sequence[int], ceiling: Optional[int] = None) -> FieldSpec:
    """modulus(낮은 차수부터, monic)를 직접 지정해서 만든다. 기약성은 여기서 검증된다."""
    k = len(modulus) - 1
    if not is_prime(p):
        raise FieldError(f"characteristic p={p} is not prime")
    if k < 1:
        raise FieldError("modulus must have degree >= 1")
    _check_ceiling(p ** k, ceiling)
    limit = get_settings().table_limit
    if k == 1:
        # x + a 는 F_p 자체. 헤더에 modulus 를 안 쓰는 표현으로 정규화한다.
        if int(modulus[-1]) != 1:
            raise FieldError(f"modulus {list(modulus)} must be monic")
        return FieldSpec(p=p, k=1, table_limit=limit)
    return FieldSpec(p=p, k=k, modulus=tuple(int(c) for c in modulus), table_limit=limit)


def field_from_order(q: int, ceiling: Optional[int] = None) -> FieldSpec:
    """q = p^k 를 분해해서 기본 modulus 로 만든다. (--assume q=<q> 용)"""
    if q < 2:
        raise FieldError(f"field order {q} must be >= 2")
    p = 2
    while q % p != 0:
        p += 1
    k, rest = 0, q
    while rest % p == 0:
        rest //= p
        k += 1
    if rest != 1 or not is_prime(p):
        raise FieldError(f"{q} is not a prime power")
    return field_new(p, k, ceiling=ceiling)


# ----------------------------
# 3. 모듈 수준 함수 (f 를 첫 인자로 받는 형태)
# ----------------------------

def add(f: FieldSpec, a: int, b: int) -> int:
    return f.add(a, b)


def neg(f: FieldSpec, a: int) -> int:
    return f.neg(a)


def sub(f: FieldSpec, a: int, b: int) -> int:
    return f.sub(a, b)


def mul(f: FieldSpec, a: int, b: int) -> int:
    return f.mul(a, b)


def inv(f: FieldSpec, a: int) -> int:
    return f.inv(a)


def div(f: FieldSpec, a: int, b: int) -> int:
    return f.div(a, b)
