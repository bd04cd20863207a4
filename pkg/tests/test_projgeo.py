import itertools

import numpy as np
import pytest

from perftile.errors import InvalidFactorizationError, NotPeriodError, NotProjectiveError, ParameterError
from perftile.gf import field_new
from perftile.linalg import FVec, VSet, row_reduce, span_members
from perftile.projgeo import (
    AffineGeometry,
    Factorization,
    PPoint,
    ProjectiveGeometry,
    counting_identity,
    factorization_to_tiling,
    full_rank_points,
    is_period_point,
    point_set,
    project_quotient,
    restrict,
    tiling_to_factorization,
    verify_factorization,
)
from perftile.tiling import Tiling, construct_projective, verify_tiling


def _points(field, n, rows):
    if not rows:
        return VSet.empty(field, n)
    return VSet.from_rows(field, n, rows)


# ----------------------------
# 점 / 기하
# ----------------------------

@pytest.mark.parametrize("p, k, n, count", [(3, 1, 3, 13), (2, 1, 3, 7), (2, 2, 3, 21), (3, 1, 2, 4)])
def test_projective_point_counts(p, k, n, count):
    assert ProjectiveGeometry(field_new(p, k), n).point_count == count


def test_affine_geometry(f3):
    geo = AffineGeometry(f3, 2)
    assert geo.point_count == 9
    # q = 3: 연결선 내부는 점 하나, 2b - a
    inner = geo.interior_rows(np.array([[0, 0]]), np.array([[1, 0]]))
    assert inner.tolist() == [[[2, 0]]]


def test_projective_line_interior(f3):
    geo = ProjectiveGeometry(f3, 2)
    inner = geo.interior_rows(np.array([[1, 0]], dtype=np.uint8), np.array([[0, 1]], dtype=np.uint8))
    assert sorted(map(tuple, inner[0].tolist())) == [(1, 1), (1, 2)]


def test_counting_identity():
    assert counting_identity("projective", 3, 3, 1, 4) == (13, 13)
    assert counting_identity("affine", 3, 2, 1, 4) == (9, 9)
    assert counting_identity("projective", 3, 3, 2, 2) == (12, 13)
    with pytest.raises(ParameterError):
        counting_identity("hyperbolic", 3, 3, 1, 1)


def test_ppoint(f3):
    with pytest.raises(ParameterError):
        PPoint(FVec(f3, (0, 2, 1)))
    with pytest.raises(ParameterError):
        PPoint(FVec(f3, (0, 0, 0)))
    p = PPoint.of(FVec(f3, (0, 2, 1)))
    assert p.rep.coords == (0, 1, 2)
    assert p.key == 1 * 3 + 2 * 9
    s = point_set(f3, 3, [p, (1, 0, 0)])
    assert len(s) == 2


# ----------------------------
# 검증
# ----------------------------

def test_simplest_projective_factorization(f3):
    f = Factorization("projective", f3, 2, _points(f3, 2, [[1, 0]]), _points(f3, 2, [[0, 1]]))
    verdict = verify_factorization(f)
    assert verdict.valid and not verdict.degenerate
    assert verdict.point_count == 4


def test_multiply_covered_witness(f3):
    f = Factorization("projective", f3, 2, _points(f3, 2, [[1, 0]]), _points(f3, 2, [[0, 1], [1, 1]]))
    verdict = verify_factorization(f)
    assert verdict.reason == "multiply_covered"
    assert verdict.witness == [1, 2]
    assert verdict.witness_count == 2
    assert len(verdict.witness_lines) == 2


def test_uncovered_witness(f3):
    f = Factorization("projective", f3, 2, _points(f3, 2, [[1, 0]]), VSet.empty(f3, 2))
    verdict = verify_factorization(f)
    assert verdict.reason == "uncovered"
    assert verdict.witness == [0, 1]
    assert verdict.witness_count == 0


def test_line_through_tile_point(f3):
    # 바깥 점은 모두 한 번씩 덮이지만 (0,0)-(2,0) 선이 𝒱 의 (1,0) 을 지난다
    u = _points(f3, 2, [[0, 0]])
    v = _points(f3, 2, [[1, 0], [2, 0], [0, 1], [1, 1], [1, 2]])
    verdict = verify_factorization(Factorization("affine", f3, 2, u, v))
    assert verdict.reason == "line_hits_tile"
    assert verdict.witness == [1, 0]
    assert verdict.witness_lines == [[[0, 0], [2, 0]]]


def test_degenerate_factorization(f3):
    u = _points(f3, 1, [[0]])
    v = _points(f3, 1, [[1], [2]])
    verdict = verify_factorization(Factorization("affine", f3, 1, u, v))
    assert verdict.valid and verdict.degenerate


def test_overlapping_point_sets_rejected(f3):
    s = _points(f3, 2, [[1, 0]])
    with pytest.raises(InvalidFactorizationError):
        Factorization("projective", f3, 2, s, s)
    with pytest.raises(ParameterError):
        Factorization("projective", f3, 2, _points(f3, 2, [[2, 0]]), VSet.empty(f3, 2))


# ----------------------------
# 타일링 <-> factorization
# ----------------------------

def test_tiling_round_trip(f3):
    x_axis = VSet.from_rows(f3, 2, [[0, 0], [1, 0], [2, 0]])
    y_axis = VSet.from_rows(f3, 2, [[0, 0], [0, 1], [0, 2]])
    t = Tiling(f3, 2, x_axis, y_axis)
    f = tiling_to_factorization(t)
    assert f.U == _points(f3, 2, [[1, 0]])
    assert f.V == _points(f3, 2, [[0, 1]])
    back = factorization_to_tiling(f)
    assert back.U == x_axis and back.V == y_axis


def test_semiprojective_tiling_has_no_factorization(semiprojective_3_3):
    with pytest.raises(NotProjectiveError):
        tiling_to_factorization(semiprojective_3_3)


@pytest.mark.slow
@pytest.mark.parametrize("p, n", [(3, 2), (2, 3)])
def test_factorizations_are_exactly_projective_tilings(p, n):
    field = field_new(p)
    geo = ProjectiveGeometry(field, n)
    pts = geo.points.coords
    for roles in itertools.product(range(3), repeat=geo.point_count):
        u = _points(field, n, [pts[i] for i, r in enumerate(roles) if r == 1])
        v = _points(field, n, [pts[i] for i, r in enumerate(roles) if r == 2])
        f = Factorization("projective", field, n, u, v)
        verdict = verify_factorization(f, geometry=geo)
        if verdict.degenerate:
            continue
        assert verdict.valid == verify_tiling(factorization_to_tiling(f)).valid, roles


# ----------------------------
# 제한 / 몫
# ----------------------------

def _plane_and_point(f3):
    """PG(2,3): 𝒰 = 직선 x_2 = 0, 𝒱 = (0,0,1)."""
    u = _points(f3, 3, [[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 0]])
    v = _points(f3, 3, [[0, 0, 1]])
    return Factorization("projective", f3, 3, u, v)


def test_period_points(f3):
    f = _plane_and_point(f3)
    assert verify_factorization(f).valid
    assert is_period_point(PPoint(FVec(f3, (1, 0, 0))), f.U)
    assert not is_period_point(PPoint(FVec(f3, (0, 0, 1))), f.U)
    assert not full_rank_points(f.U)
    assert full_rank_points(f.U.union(f.V))


def test_quotient_by_period_point(f3):
    f = _plane_and_point(f3)
    q = project_quotient(f, PPoint(FVec(f3, (1, 0, 0))))
    assert q.n == 2
    assert q.U == _points(f3, 2, [[1, 0]])
    assert q.V == _points(f3, 2, [[0, 1]])
    assert verify_factorization(q).valid
    with pytest.raises(NotPeriodError):
        project_quotient(f, PPoint(FVec(f3, (0, 0, 1))))


def test_restrict_to_span_of_u(f3):
    u = _points(f3, 3, [[1, 0, 0]])
    v = _points(f3, 3, [[0, 1, 0], [0, 0, 1], [0, 1, 1], [0, 1, 2]])
    f = Factorization("projective", f3, 3, u, v)
    assert verify_factorization(f).valid
    r = restrict(f)
    assert r.n == 1
    assert r.U == _points(f3, 1, [[1]])
    assert len(r.V) == 0
    assert verify_factorization(r).degenerate


def test_restrict_keeps_full_rank_factorization(f3):
    everything = ProjectiveGeometry(f3, 2).points
    f = Factorization("projective", f3, 2, everything, VSet.empty(f3, 2))
    assert verify_factorization(f).degenerate
    assert restrict(f) is f


def test_operations_require_a_factorization(f3):
    f = Factorization("projective", f3, 2, _points(f3, 2, [[1, 0]]), VSet.empty(f3, 2))
    with pytest.raises(InvalidFactorizationError):
        restrict(f)
    with pytest.raises(InvalidFactorizationError):
        project_quotient(f, PPoint(FVec(f3, (1, 0))))


# ----------------------------
# 부분공간 쌍
# ----------------------------

def _random_basis(field, n, rng):
    while True:
        rows = rng.integers(0, field.q, size=(n, n)).astype(field.dtype)
        if len(row_reduce(field, rows)[1]) == n:
            return rows


def _subspace_pairs(field, count, seed):
    rng = np.random.default_rng(seed)
    for i in range(count):
        basis = _random_basis(field, 4, rng)
        k = 1 + i % 3
        yield basis, k, span_members(field, 4, basis[:k]), span_members(field, 4, basis[k:])


@pytest.mark.parametrize("p, k", [(3, 1), (2, 2)])
def test_subspace_pairs_agree_with_factorizations(p, k):
    field = field_new(p, k)
    for basis, dim, w, w2 in _subspace_pairs(field, 25, seed=p * 10 + k):
        t = Tiling(field, 4, w, w2)
        f = tiling_to_factorization(t)
        assert verify_tiling(t).valid
        assert verify_factorization(f).valid
        back = factorization_to_tiling(f)
        assert back.U == w and back.V == w2

        # 같은 차원이지만 W 와 겹치는 부분공간: 타일링도 factorization 도 아니다
        overlap = span_members(field, 4, np.vstack([basis[:1], basis[dim + 1 :]]))
        assert not verify_tiling(Tiling(field, 4, w, overlap)).valid
        with pytest.raises(InvalidFactorizationError):
            tiling_to_factorization(Tiling(field, 4, w, overlap))


def test_restrict_and_quotient_of_subspace_pairs(f3):
    for basis, dim, w, w2 in _subspace_pairs(f3, 12, seed=7):
        f = tiling_to_factorization(Tiling(f3, 4, w, w2))
        r = restrict(f)
        assert r.n == dim
        assert verify_factorization(r).valid
        if dim < 2:
            continue
        x = PPoint.of(FVec(f3, tuple(int(c) for c in basis[0])))
        assert is_period_point(x, f.U)
        q = project_quotient(f, x)
        assert q.n == 3
        assert len(q.U) == (3 ** (dim - 1) - 1) // 2
        assert verify_factorization(q).valid


# ----------------------------
# projective 구성에서 온 factorization
# ----------------------------

def _with_free_coordinate(s, lams):
    """F_q^n 의 집합을 F_q^{n+1} 로: 마지막 좌표에 lams 의 값을 각각 붙인다."""
    field = s.field
    rows = [np.hstack([s.coords, np.full((len(s), 1), lam, dtype=field.dtype)]) for lam in lams]
    return VSet.from_rows(field, s.n + 1, np.vstack(rows))


@pytest.mark.slow
def test_projective_construction_factorization(f3):
    t = construct_projective(f3, 5)
    f = tiling_to_factorization(t)
    assert len(f.U) == len(f.V) == 121
    verdict = verify_factorization(f)
    assert verdict.valid and not verdict.degenerate
    assert verdict.point_count == (3**10 - 1) // 2

    assert full_rank_points(f.U) and full_rank_points(f.V)
    assert not any(is_period_point(p, f.U) for p in f.points_u())
    assert restrict(f) is f
    with pytest.raises(NotPeriodError):
        project_quotient(f, f.points_u()[0])

    # U ⊕ ⟨e⟩, V ⊕ {0}: 𝒰 에 period point e 가 생긴다. e 로 나누면 원래 factorization.
    wide = Tiling(f3, 11, _with_free_coordinate(t.U, range(3)), _with_free_coordinate(t.V, [0]))
    g = tiling_to_factorization(wide)
    assert verify_factorization(g).valid
    e = PPoint(FVec.unit(f3, 11, 10))
    assert is_period_point(e, g.U)

    q = project_quotient(g, e)
    assert q.same_as(f)
    assert verify_factorization(q).valid

    assert restrict(g) is g

    # U ⊕ {0}, V ⊕ ⟨e⟩: 𝒰 는 초평면 안에 있고, ⟨⟨𝒰⟩⟩ 로 제한하면 원래 factorization.
    flat = Tiling(f3, 11, _with_free_coordinate(t.U, [0]), _with_free_coordinate(t.V, range(3)))
    h = tiling_to_factorization(flat)
    assert not full_rank_points(h.U)
    r = restrict(h)
    assert r.n == 10
    assert r.same_as(f)
    assert verify_factorization(r).valid
