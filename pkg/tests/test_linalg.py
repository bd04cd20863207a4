import numpy as np
import pytest

from perftile.errors import ConstructionError, DimensionMismatch, FieldError, ParameterError
from perftile.linalg import (
    FMatrix,
    FVec,
    VSet,
    in_span,
    inverse,
    is_full_rank,
    is_keyed,
    keys_of,
    mat_vec,
    mat_vecs,
    normalize_rows,
    rank_affine,
    rank_linear,
    row_reduce,
    solve,
    span_basis,
    span_members,
    sumset,
)


# ----------------------------
# 벡터 / 집합
# ----------------------------

def test_fvec_arithmetic_and_key(f3):
    a = FVec(f3, (1, 2, 0))
    b = FVec(f3, (2, 2, 1))
    assert (a + b).coords == (0, 1, 1)
    assert (a - b).coords == (2, 0, 2)
    assert (-a).coords == (2, 1, 0)
    assert a.scale(2).coords == (2, 1, 0)
    assert a.key == 1 + 2 * 3
    assert FVec.from_key(f3, 3, a.key) == a
    assert FVec.zero(f3, 3).is_zero()
    with pytest.raises(FieldError):
        FVec(f3, (3, 0))
    with pytest.raises(DimensionMismatch):
        a + FVec(f3, (1, 1))


def test_vset_sorts_and_deduplicates(f3):
    s = VSet.from_rows(f3, 2, [[1, 0], [0, 1], [1, 0]])
    assert len(s) == 2
    assert list(s.keys) == [1, 3]
    assert [v.coords for v in s] == [(1, 0), (0, 1)]
    assert (0, 1) in s and (1, 1) not in s
    assert not s.coords.flags.writeable


def test_vset_operations(f3):
    line = VSet.from_rows(f3, 2, [[0, 0], [1, 0], [2, 0]])
    other = VSet.from_rows(f3, 2, [[0, 0], [0, 1]])
    assert line.translate((0, 1)) == VSet.from_rows(f3, 2, [[0, 1], [1, 1], [2, 1]])
    assert line.scale(2) == line
    assert len(line.union(other)) == 4
    assert line.intersection(other) == VSet.zero(f3, 2)
    assert line.difference(other) == VSet.from_rows(f3, 2, [[1, 0], [2, 0]])
    assert not line.isdisjoint(other)
    assert line.has_zero
    assert line.min_member().is_zero()
    assert list(line.index_of_keys([2, 5, 1])) == [2, -1, 1]
    with pytest.raises(DimensionMismatch):
        line.union(VSet.zero(f3, 3))
    with pytest.raises(ParameterError):
        VSet.empty(f3, 2).min_member()


def test_whole_space_and_keys(f4):
    space = VSet.whole_space(f4, 3)
    assert len(space) == 64
    assert list(space.keys) == list(range(64))
    assert VSet.from_keys(f4, 3, [5, 1, 5]) == VSet.from_rows(f4, 3, [[1, 0, 0], [1, 1, 0]])


def test_big_spaces_fall_back_to_python_int_keys(f3):
    assert is_keyed(f3, 39)
    assert not is_keyed(f3, 40)
    v = FVec(f3, (2,) * 40)
    assert keys_of(f3, v.as_array()[None, :])[0] == v.key == 3**40 - 1


def test_sumset(f3):
    a = VSet.from_rows(f3, 2, [[0, 0], [1, 0], [2, 0]])
    b = VSet.from_rows(f3, 2, [[0, 0], [0, 1], [0, 2]])
    assert sumset(a, b, strict=True) == VSet.whole_space(f3, 2)

    c = VSet.from_rows(f3, 1, [[0], [1]])
    assert len(sumset(c, c)) == 3
    with pytest.raises(ConstructionError):
        sumset(c, c, strict=True)


# ----------------------------
# 소거 / rank
# ----------------------------

def test_row_reduce(f3):
    R, pivots = row_reduce(f3, [[1, 2, 0], [2, 1, 0], [0, 0, 1]])
    assert pivots == [0, 2]
    assert R.tolist() == [[1, 2, 0], [0, 0, 1]]

    R, pivots = row_reduce(f3, [[0, 2, 1], [0, 1, 1]])
    assert pivots == [1, 2]
    assert R.tolist() == [[0, 1, 0], [0, 0, 1]]


def test_ranks(f3):
    s = VSet.from_rows(f3, 3, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    assert rank_linear(s) == 2
    assert rank_affine(s) == 2
    shifted = s.translate((0, 0, 1))
    assert rank_linear(shifted) == 3
    assert rank_affine(shifted) == 2
    assert not is_full_rank(s)
    assert is_full_rank(VSet.whole_space(f3, 3))
    with pytest.raises(ParameterError):
        rank_affine(VSet.empty(f3, 3))


def test_span(f3):
    s = VSet.from_rows(f3, 3, [[1, 1, 0], [2, 2, 0], [0, 1, 1]])
    basis = span_basis(s)
    assert len(basis) == 2
    members = span_members(f3, 3, basis)
    assert len(members) == 9
    R, pivots = row_reduce(f3, s.coords)
    inside = in_span(f3, R, pivots, [[1, 2, 1], [1, 0, 0]])
    assert inside.tolist() == [True, False]


def test_extension_field_matvec_matches_scalar_arithmetic(f4):
    rng = np.random.default_rng(0)
    h = rng.integers(0, 4, size=(3, 5))
    xs = rng.integers(0, 4, size=(7, 5))
    got = mat_vecs(f4, h, xs)
    for r, x in enumerate(xs):
        for i in range(3):
            acc = 0
            for j in range(5):
                acc = f4.add(acc, f4.mul(int(h[i, j]), int(x[j])))
            assert got[r, i] == acc


# ----------------------------
# 연립방정식
# ----------------------------

def test_solve_unique(f3):
    sol = solve(FMatrix.identity(f3, 3), (1, 2, 0))
    assert sol.consistent
    assert sol.particular.coords == (1, 2, 0)
    assert sol.nullity == 0


def test_solve_inconsistent(f3):
    sol = solve(FMatrix(f3, [[1, 0], [1, 0]]), (0, 1))
    assert not sol.consistent
    assert sol.particular is None
    assert sol.size(3) == 0


def test_solve_underdetermined(f3):
    h = FMatrix(f3, [[1, 1]])
    sol = solve(h, (2,))
    assert sol.consistent and sol.nullity == 1 and sol.size(3) == 3
    assert mat_vec(h, sol.particular).coords == (2,)
    for k in sol.kernel_basis:
        assert mat_vec(h, k).is_zero()


def test_inverse(f3):
    a = FMatrix(f3, [[1, 1], [0, 1]])
    assert inverse(a) == FMatrix(f3, [[1, 2], [0, 1]])
    with pytest.raises(ParameterError, match="singular"):
        inverse(FMatrix(f3, [[1, 2], [2, 1]]))
    with pytest.raises(DimensionMismatch):
        inverse(FMatrix(f3, [[1, 2]]))


def test_from_columns(f3):
    h = FMatrix.from_columns(f3, 2, [(1, 0), (1, 2), (0, 1)])
    assert (h.rows, h.cols) == (2, 3)
    assert h.column(1).coords == (1, 2)


def test_normalize_rows(f3):
    assert normalize_rows(f3, [[0, 2, 1], [2, 2, 0]]).tolist() == [[0, 1, 2], [1, 1, 0]]
    with pytest.raises(ParameterError):
        normalize_rows(f3, [[0, 0, 0]])
