import itertools

import pytest

from perftile.errors import CeilingExceeded, CountingIdentityError
from perftile.gf import field_new
from perftile.linalg import VSet
from perftile.projgeo import Factorization, counting_identity, exhaustive_search, make_geometry, verify_factorization
from perftile.utils.tile_io import format_solutions, parse_solutions


def _brute_force_count(kind, field, n, a, b):
    geo = make_geometry(kind, field, n)
    pts = geo.points.coords
    count = 0
    for us in itertools.combinations(range(geo.point_count), a):
        rest = [i for i in range(geo.point_count) if i not in us]
        for vs in itertools.combinations(rest, b):
            u = VSet.from_rows(field, n, pts[list(us)])
            v = VSet.from_rows(field, n, pts[list(vs)])
            if verify_factorization(Factorization(kind, field, n, u, v), geometry=geo).valid:
                count += 1
    return count


def test_projective_plane_over_f3(f3):
    found = exhaustive_search("projective", f3, 3, (1, 4))
    assert len(found) == 1053
    assert all(len(f.U) == 1 and len(f.V) == 4 for f in found)


def test_affine_plane_over_f3(f3):
    found = exhaustive_search("affine", f3, 2, (1, 4))
    assert len(found) == 144
    assert all(verify_factorization(f).valid for f in found)


@pytest.mark.parametrize(
    "kind, p, n, sizes",
    [
        ("projective", 2, 3, (1, 3)),
        ("projective", 3, 2, (1, 1)),
        ("projective", 3, 3, (1, 4)),
        ("projective", 3, 3, (4, 1)),
        ("projective", 3, 3, (0, 13)),
        ("projective", 3, 3, (13, 0)),
        ("affine", 3, 2, (1, 4)),
        ("affine", 2, 2, (2, 2)),
    ],
)
def test_search_matches_brute_force(kind, p, n, sizes):
    field = field_new(p)
    found = exhaustive_search(kind, field, n, sizes)
    assert len(found) == _brute_force_count(kind, field, n, *sizes)


def test_plane_over_f3_size_pairs():
    pairs = []
    for a in range(14):
        for b in range(14):
            lhs, rhs = counting_identity("projective", 3, 3, a, b)
            if lhs == rhs:
                pairs.append((a, b))
    assert pairs == [(0, 13), (1, 4), (4, 1), (13, 0)]


def test_results_are_sorted_and_thread_independent(f3):
    serial = exhaustive_search("affine", f3, 2, (1, 4), threads=1)
    parallel = exhaustive_search("affine", f3, 2, (1, 4), threads=4)
    assert [(f.U.keys.tolist(), f.V.keys.tolist()) for f in serial] == [
        (f.U.keys.tolist(), f.V.keys.tolist()) for f in parallel
    ]
    assert all(a.same_as(b) for a, b in zip(serial, parallel))


def test_first_only(f3):
    first = exhaustive_search("projective", f3, 3, (1, 4), first_only=True)
    again = exhaustive_search("projective", f3, 3, (1, 4), first_only=True, threads=3)
    assert len(first) == len(again) == 1
    assert first[0].same_as(again[0])
    assert verify_factorization(first[0]).valid
    everything = exhaustive_search("projective", f3, 3, (1, 4))
    assert any(first[0].same_as(f) for f in everything)


def test_fix_first_keeps_point_zero_in_u(f3):
    found = exhaustive_search("projective", f3, 3, (1, 4), fix_first=True)
    geo = make_geometry("projective", f3, 3)
    zero = geo.points.coords[0]
    assert len(found) == 81
    assert all(f.U.contains_rows(zero[None, :])[0] for f in found)


def test_degenerate_sizes(f3):
    found = exhaustive_search("projective", f3, 2, (4, 0))
    assert len(found) == 1
    assert verify_factorization(found[0]).degenerate


def test_counting_identity_is_checked_first(f3):
    with pytest.raises(CountingIdentityError) as info:
        exhaustive_search("projective", f3, 3, (2, 2))
    assert (info.value.lhs, info.value.rhs) == (12, 13)
    assert "12 != 13" in str(info.value)


def test_point_ceiling(f3):
    with pytest.raises(CeilingExceeded, match="--allow-large"):
        exhaustive_search("projective", f3, 3, (1, 4), max_points=10)
    assert len(exhaustive_search("projective", f3, 3, (1, 4), max_points=10, allow_large=True, first_only=True)) == 1


def test_solutions_file(f3):
    found = exhaustive_search("affine", f3, 2, (1, 4))[:3]
    text = format_solutions("affine", f3, 2, [(f.U, f.V) for f in found])
    assert text.startswith("solutions affine 3 3 1 2 3\nsolution 1\nU 1\n")
    geometry, field, n, parsed = parse_solutions(text)
    assert (geometry, field, n) == ("affine", f3, 2)
    assert [(u, v) for u, v in parsed] == [(f.U, f.V) for f in found]


def test_f7_cube_sizes_satisfy_the_identity():
    assert counting_identity("affine", 7, 3, 5, 13) == (343, 343)


def test_f7_cube_needs_the_override():
    with pytest.raises(CeilingExceeded) as info:
        exhaustive_search("affine", field_new(7), 3, (5, 13))
    assert info.value.required == 343
    assert "343 points" in str(info.value)


@pytest.mark.longrun
def test_f7_cube_has_no_factorization_with_sizes_5_13():
    assert exhaustive_search("affine", field_new(7), 3, (5, 13), allow_large=True, first_only=True) == []
