# utils/tile_io.py
"""
TileFile 읽기/쓰기

    1행: q p k n count kind
    2행: modulus a0 a1 ... ak      (k > 1 일 때만)
    이후: 한 행에 n 개의 정수 (공백 하나), key 오름차순, 중복 없음

- 헤더가 없는 파일은 assume_q 를 줄 때만 받는다. 행은 공백 구분이거나,
  q <= 10 이면 "0120..." 처럼 붙여 쓴 숫자열이어도 된다. 순서는 상관없다.
- 오류는 TileFormatError(path, line) 로 올린다. line 은 1부터.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from perftile.errors import FieldError, HeaderMismatchError, TileFormatError
from perftile.gf import FieldSpec, field_from_order, field_new, field_with_modulus
from perftile.linalg import VSet, keys_of
from perftile.schemas.files import FileKind, TileHeader

PathLike = Union[str, Path]

KINDS = ("tile", "code", "points")


# ----------------------------
# 0. 헤더 <-> FieldSpec
# ----------------------------

def header_for(field: FieldSpec, n: int, count: int, kind: FileKind) -> TileHeader:
    return TileHeader(
        q=field.q,
        p=field.p,
        k=field.k,
        n=n,
        count=count,
        kind=kind,
        modulus=field.modulus,
    )


def field_from_header(header: TileHeader) -> FieldSpec:
    if header.k == 1:
        return field_new(header.p)
    return field_with_modulus(header.p, header.modulus)


# ----------------------------
# 1. 쓰기
# ----------------------------

def format_rows(rows: np.ndarray) -> list[str]:
    return [" ".join(str(int(c)) for c in row) for row in rows]


def format_set(s: VSet, kind: FileKind) -> str:
    header = header_for(s.field, s.n, len(s), kind)
    return "\n".join(header.header_lines() + format_rows(s.coords)) + "\n"


def write_set(path: PathLike, s: VSet, kind: FileKind) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_set(s, kind), encoding="utf-8")
    return path


# ----------------------------
# 2. 읽기
# ----------------------------

def _looks_like_header(tokens: list[str]) -> bool:
    return len(tokens) == 6 and tokens[5] in KINDS and all(t.isdigit() for t in tokens[:5])


def _parse_header(lines: list[str], path: Optional[str]) -> tuple[TileHeader, int]:
    """(헤더, 데이터가 시작하는 줄 인덱스)."""
    tokens = lines[0].split()
    q, p, k, n, count = (int(t) for t in tokens[:5])
    modulus = None
    start = 1
    if k > 1:
        if len(lines) < 2 or not lines[1].startswith("modulus"):
            raise TileFormatError("extension field header needs a 'modulus' line", path, 2)
        try:
            modulus = tuple(int(t) for t in lines[1].split()[1:])
        except ValueError:
            raise TileFormatError("modulus coefficients must be integers", path, 2)
        start = 2
    try:
        header = TileHeader(q=q, p=p, k=k, n=n, count=count, kind=tokens[5], modulus=modulus)
    except ValidationError as e:
        msg = "; ".join(err["msg"] for err in e.errors())
        raise TileFormatError(f"bad header: {msg}", path, 1) from e
    return header, start


def _parse_row(line: str, q: int, n: Optional[int], lineno: int, path: Optional[str], contiguous_ok: bool) -> list[int]:
    tokens = line.split()
    if len(tokens) == 1 and contiguous_ok and (n is None or n > 1):
        tokens = list(tokens[0])
    try:
        row = [int(t) for t in tokens]
    except ValueError:
        raise TileFormatError(f"non-integer entry in {line!r}", path, lineno)
    if n is not None and len(row) != n:
        raise TileFormatError(f"expected {n} entries, found {len(row)}", path, lineno)
    for c in row:
        if not (0 <= c < q):
            raise TileFormatError(f"entry {c} out of range [0, {q})", path, lineno)
    return row


def parse_set(
    text: str,
    path: Optional[str] = None,
    assume_q: Optional[int] = None,
    expect_kind: Optional[FileKind] = None,
) -> tuple[TileHeader, VSet]:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise TileFormatError("empty file", path, 1)

    if _looks_like_header(lines[0].split()):
        header, start = _parse_header(lines, path)
        try:
            field = field_from_header(header)
        except FieldError as e:
            raise TileFormatError(str(e), path, 2 if header.k > 1 else 1) from e
        if expect_kind is not None and header.kind != expect_kind:
            raise TileFormatError(f"expected a {expect_kind} file, found {header.kind}", path, 1)

        rows = [
            _parse_row(lines[i], field.q, header.n, i + 1, path, contiguous_ok=False)
            for i in range(start, len(lines))
        ]
        if len(rows) != header.count:
            raise TileFormatError(f"header announces {header.count} rows, found {len(rows)}", path, 1)
        arr = np.array(rows, dtype=field.dtype).reshape(len(rows), header.n)
        keys = keys_of(field, arr)
        if len(keys) > 1:
            step = keys[1:] > keys[:-1]
            if not np.all(step):
                j = int(np.flatnonzero(~step)[0]) + 1
                what = "duplicate row" if keys[j] == keys[j - 1] else "rows not sorted by key"
                raise TileFormatError(what, path, start + j + 1)
        return header, VSet(field, header.n, arr, keys)

    if assume_q is None:
        raise TileFormatError("missing header (pass --assume q=<q> for headerless digit files)", path, 1)
    field = field_from_order(assume_q)
    rows = []
    n = None
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        row = _parse_row(line, field.q, n, i + 1, path, contiguous_ok=field.q <= 10)
        n = len(row) if n is None else n
        rows.append(row)
    arr = np.array(rows, dtype=field.dtype)
    s = VSet.from_rows(field, n, arr)
    if len(s) != len(rows):
        raise TileFormatError(f"{len(rows) - len(s)} duplicate rows", path)
    header = header_for(field, n, len(s), expect_kind or "code")
    return header, s


def read_set(
    path: PathLike,
    assume_q: Optional[int] = None,
    expect_kind: Optional[FileKind] = None,
) -> tuple[TileHeader, VSet]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise TileFormatError(f"cannot read file: {e.strerror}", str(path)) from e
    return parse_set(text, str(path), assume_q=assume_q, expect_kind=expect_kind)


def read_pair(
    path_a: PathLike,
    path_b: PathLike,
    expect_kind: Optional[FileKind] = None,
) -> tuple[TileHeader, VSet, VSet]:
    """두 파일을 읽고 헤더의 체/길이가 같은지 확인한다."""
    ha, a = read_set(path_a, expect_kind=expect_kind)
    hb, b = read_set(path_b, expect_kind=expect_kind)
    if not ha.same_space(hb):
        raise HeaderMismatchError(
            f"headers disagree: F_{ha.q}^{ha.n} in {path_a} vs F_{hb.q}^{hb.n} in {path_b}",
            str(path_b),
            1,
        )
    return ha, a, b


# ----------------------------
# 3. 탐색 결과 파일
# ----------------------------

def format_solutions(
    geometry: str,
    field: FieldSpec,
    n: int,
    solutions: list[tuple[VSet, VSet]],
) -> str:
    """
    solutions <geometry> q p k n <개수>
    [modulus ...]
    solution 1
    U <a>
    <행들>
    V <b>
    <행들>
    ...
    """
    lines = [f"solutions {geometry} {field.q} {field.p} {field.k} {n} {len(solutions)}"]
    if field.k > 1:
        lines.append("modulus " + " ".join(str(a) for a in field.modulus))
    for idx, (u, v) in enumerate(solutions, start=1):
        lines.append(f"solution {idx}")
        lines.append(f"U {len(u)}")
        lines.extend(format_rows(u.coords))
        lines.append(f"V {len(v)}")
        lines.extend(format_rows(v.coords))
    return "\n".join(lines) + "\n"


def write_solutions(
    path: PathLike,
    geometry: str,
    field: FieldSpec,
    n: int,
    solutions: list[tuple[VSet, VSet]],
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_solutions(geometry, field, n, solutions), encoding="utf-8")
    return path


def parse_solutions(text: str, path: Optional[str] = None) -> tuple[str, FieldSpec, int, list[tuple[VSet, VSet]]]:
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 7 or head[0] != "solutions":
        raise TileFormatError("expected 'solutions <geometry> q p k n count'", path, 1)
    geometry = head[1]
    q, p, k, n, count = (int(t) for t in head[2:])
    pos = 1
    if k > 1:
        field = field_with_modulus(p, [int(t) for t in lines[1].split()[1:]])
        pos = 2
    else:
        field = field_new(p)
    if field.q != q:
        raise TileFormatError(f"q = {q} is not p^k", path, 1)

    def block(tag: str) -> VSet:
        nonlocal pos
        parts = lines[pos].split() if pos < len(lines) else []
        if len(parts) != 2 or parts[0] != tag:
            raise TileFormatError(f"expected '{tag} <count>'", path, pos + 1)
        size = int(parts[1])
        rows = [_parse_row(lines[pos + 1 + j], q, n, pos + 2 + j, path, False) for j in range(size)]
        pos += 1 + size
        if not rows:
            return VSet.empty(field, n)
        return VSet.from_rows(field, n, np.array(rows, dtype=field.dtype))

    out = []
    for idx in range(1, count + 1):
        if pos >= len(lines) or lines[pos].strip() != f"solution {idx}":
            raise TileFormatError(f"expected 'solution {idx}'", path, pos + 1)
        pos += 1
        u = block("U")
        v = block("V")
        out.append((u, v))
    return geometry, field, n, out
