import pytest

from perftile.errors import HeaderMismatchError, TileFormatError
from perftile.linalg import VSet
from perftile.utils.tile_io import format_set, parse_set, read_pair, read_set, write_set


def test_write_then_read(tmp_path, semiprojective_3_3):
    path = write_set(tmp_path / "u.txt", semiprojective_3_3.U, "tile")
    lines = path.read_text().splitlines()
    assert lines[0] == "3 3 1 6 27 tile"
    assert lines[1] == "0 0 0 0 0 0"
    header, u = read_set(path, expect_kind="tile")
    assert header.count == 27 and header.n == 6
    assert u == semiprojective_3_3.U


def test_extension_field_header(f4):
    text = format_set(VSet.whole_space(f4, 1), "code")
    assert text.splitlines()[:2] == ["4 2 2 1 4 code", "modulus 1 1 1"]
    header, s = parse_set(text)
    assert header.modulus == (1, 1, 1)
    assert s.field == f4 and len(s) == 4


@pytest.mark.parametrize(
    "text, message, line",
    [
        ("3 3 1 2 2 tile\n0 1\n1 0\n", "rows not sorted by key", 3),
        ("3 3 1 2 2 tile\n1 0\n1 0\n", "duplicate row", 3),
        ("3 3 1 2 3 tile\n1 0\n0 1\n", "announces 3 rows", 1),
        ("3 3 1 2 1 tile\n0 3\n", "out of range", 2),
        ("3 3 1 2 1 tile\n0 1 2\n", "expected 2 entries", 2),
        ("3 3 1 2 1 tile\n0 x\n", "non-integer", 2),
        ("4 3 1 2 0 tile\n", "bad header", 1),
        ("4 2 2 1 0 tile\n", "modulus", 2),
        ("4 2 2 1 0 tile\nmodulus 1 0 1\n", "reducible", 2),
        ("", "empty file", 1),
    ],
)
def test_format_errors_point_at_the_line(text, message, line):
    with pytest.raises(TileFormatError, match=message) as info:
        parse_set(text, path="bad.txt")
    assert info.value.line == line
    assert str(info.value).startswith(f"bad.txt:{line}: ")


def test_wrong_kind():
    with pytest.raises(TileFormatError, match="expected a tile file"):
        parse_set("3 3 1 1 1 code\n0\n", expect_kind="tile")


def test_headerless_digit_strings():
    with pytest.raises(TileFormatError, match="missing header"):
        parse_set("012\n120\n")
    header, s = parse_set("120\n012\n\n", assume_q=3)
    assert header.kind == "code"
    assert header.n == 3 and len(s) == 2
    # key 순: (1,2,0) = 7, (0,1,2) = 21
    assert [v.coords for v in s] == [(1, 2, 0), (0, 1, 2)]
    with pytest.raises(TileFormatError, match="duplicate"):
        parse_set("012\n012\n", assume_q=3)


def test_missing_file(tmp_path):
    with pytest.raises(TileFormatError, match="cannot read"):
        read_set(tmp_path / "nope.txt")


def test_read_pair_checks_headers(tmp_path, f3, f4):
    a = write_set(tmp_path / "a.txt", VSet.zero(f3, 2), "tile")
    b = write_set(tmp_path / "b.txt", VSet.zero(f3, 3), "tile")
    c = write_set(tmp_path / "c.txt", VSet.zero(f4, 2), "tile")
    with pytest.raises(HeaderMismatchError):
        read_pair(a, b)
    with pytest.raises(HeaderMismatchError):
        read_pair(a, c)
    header, u, v = read_pair(a, a)
    assert header.n == 2 and u == v
