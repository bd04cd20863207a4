# settings.py
"""
설정 로딩

- .env → 환경변수 → Settings(pydantic) 순서로 읽는다.
- 모든 ceiling / 기본 스레드 수는 여기서만 정한다.
- 라이브러리 함수들은 ceiling=None 이면 get_settings() 값을 쓰고,
  명시적으로 넘기면 그 값을 우선한다.
"""

from __future__ import annotations

import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from perftile.errors import ConfigError


ENV_PREFIX = "PERFTILE_"

_dotenv_loaded = False


class Settings(BaseModel):
    """perftile 전역 설정."""

    enum_ceiling: int = Field(
        default=2**24,
        gt=0,
        description="code_from_tiling이 열거할 수 있는 q^N 상한. occupancy 배열 검증의 공간 크기 상한이기도 하다.",
    )
    field_ceiling: int = Field(
        default=2**16,
        gt=1,
        description="field_new가 받아주는 체의 위수 상한.",
    )
    table_limit: int = Field(
        default=256,
        gt=1,
        description="이 위수 이하의 체는 덧셈/곱셈/역원 테이블을 미리 만든다.",
    )
    search_max_points: int = Field(
        default=200,
        gt=0,
        description="exhaustive_search가 override 없이 받아주는 점 개수 상한.",
    )
    threads: int = Field(
        default=1,
        ge=1,
        description="기본 worker 수. 1이 기준(reference) 동작.",
    )
    verbose: bool = Field(
        default=False,
        description="True면 main이 stderr에 진행 배너를 찍는다.",
    )


def _read_env() -> dict:
    global _dotenv_loaded
    if not _dotenv_loaded:
        # .env가 없어도 문제 없음. 이미 설정된 환경변수를 덮어쓰지 않는다.
        load_dotenv()
        _dotenv_loaded = True

    values = {}
    for name in Settings.model_fields:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is None or raw.strip() == "":
            continue
        raw = raw.strip()
        if name == "verbose":
            values[name] = raw.lower() in ("1", "true", "yes", "on")
        else:
            try:
                # 2**24 같은 표기는 받지 않는다. 정수 리터럴만.
                values[name] = int(raw, 0)
            except ValueError:
                raise ConfigError(f"{ENV_PREFIX}{name.upper()} must be an integer, got {raw!r}")
    return values


def get_settings() -> Settings:
    """
    현재 환경 기준 Settings를 만든다.

    캐시하지 않는다. (테스트에서 monkeypatch.setenv로 바꾸는 걸 그대로 반영하기 위해)
    """
    try:
        return Settings(**_read_env())
    except ValidationError as e:
        raise ConfigError(f"invalid perftile settings: {e}") from e
