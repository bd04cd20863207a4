# errors.py
"""
perftile 예외 정의

- 검증 "실패"(타일링이 아님, perfect code가 아님 등)는 예외가 아니라 verdict 모델로 돌려준다.
- 여기 있는 예외들은 잘못된 사용 / 깨진 입력 / 내부 assertion 실패용이다.
- 모든 예외는 PerftileError + 대응하는 builtin 예외를 같이 상속한다.
  (호출 측에서 ValueError 등으로도 잡을 수 있게)
"""

from __future__ import annotations

from typing import Optional


class PerftileError(Exception):
    """perftile의 모든 예외의 베이스."""


class ConfigError(PerftileError, ValueError):
    """환경변수 / .env 설정값이 잘못된 경우."""


# ----------------------------
# gf / linalg
# ----------------------------

class FieldError(PerftileError, ValueError):
    """p가 소수가 아님, modulus가 기약이 아님, 원소 범위 초과, ceiling 초과 등."""


class FieldDivisionError(FieldError, ZeroDivisionError):
    """0으로 나누기 (inv(0), div(a, 0))."""


class DimensionMismatch(PerftileError, ValueError):
    """체(field)나 길이 n이 서로 맞지 않는 벡터/집합/행렬을 섞은 경우."""


# ----------------------------
# tiling / codes / projgeo
# ----------------------------

class ParameterError(PerftileError, ValueError):
    """구성 전제조건(q, m 범위) 위반 등 잘못된 인자."""


class ConstructionError(PerftileError, RuntimeError):
    """구성 내부 assertion 실패. 올바른 입력이면 절대 나오면 안 된다."""


class NotProjectiveError(PerftileError, ValueError):
    """projective 집합이어야 하는 곳에 projective가 아닌 집합이 들어온 경우."""


class InvalidTilingError(PerftileError, ValueError):
    """타일링이어야 하는 입력이 타일링이 아닌 경우."""


class InvalidFactorizationError(PerftileError, ValueError):
    """factorization이어야 하는 입력이 factorization이 아닌 경우 (또는 𝒰, 𝒱가 겹치는 경우)."""


class NotPeriodError(PerftileError, ValueError):
    """quotient를 만들 점이 𝒰의 period point가 아닌 경우."""


class CeilingExceeded(PerftileError, ValueError):
    """열거 / 탐색 규모가 설정된 ceiling을 넘는 경우."""

    def __init__(
        self,
        message: str,
        required: int,
        ceiling: int,
        length: Optional[int] = None,
    ):
        super().__init__(message)
        self.required = required
        self.ceiling = ceiling
        self.length = length


class CountingIdentityError(PerftileError, ValueError):
    """탐색 크기 (a, b)가 counting identity를 만족하지 않는 경우. 양변을 같이 들고 다닌다."""

    def __init__(self, message: str, lhs: int, rhs: int):
        super().__init__(message)
        self.lhs = lhs
        self.rhs = rhs


# ----------------------------
# 파일 포맷
# ----------------------------

class TileFormatError(PerftileError, ValueError):
    """파일 형식 오류. line은 1부터 센다 (헤더 문제면 1 또는 2)."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class HeaderMismatchError(TileFormatError):
    """두 파일의 헤더(q, p, k, n, modulus)가 서로 맞지 않는 경우."""
