# conftest.py

import os

import pytest

from perftile.codes import code_from_tiling
from perftile.gf import field_new
from perftile.tiling import construct_semiprojective


def pytest_collection_modifyitems(config, items):
    if os.environ.get("PERFTILE_LONGRUN") == "1":
        return
    skip = pytest.mark.skip(reason="set PERFTILE_LONGRUN=1 to run")
    for item in items:
        if "longrun" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # 개발자 셸의 PERFTILE_* 값이 기본 ceiling 을 바꾸지 않도록
    for name in list(os.environ):
        if name.startswith("PERFTILE_") and name != "PERFTILE_LONGRUN":
            monkeypatch.delenv(name)


@pytest.fixture(scope="session")
def f2():
    return field_new(2)


@pytest.fixture(scope="session")
def f3():
    return field_new(3)


@pytest.fixture(scope="session")
def f4():
    return field_new(2, 2)


@pytest.fixture(scope="session")
def semiprojective_3_3(f3):
    """F_3^6 의 semiprojective 타일링 (m = 3)."""
    return construct_semiprojective(f3, 3)


@pytest.fixture(scope="session")
def code_3_3(semiprojective_3_3):
    """위 타일링에서 나온 길이 13 의 1-perfect code (59049 개)."""
    return code_from_tiling(semiprojective_3_3)
