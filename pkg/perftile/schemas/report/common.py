"""
StatsReport 스키마 정의

- CLI 가 stdout 으로 내보내는 구조화된 보고서.
- 모든 필드는 값이 있거나, 명시적으로 Skipped(reason=...) 이다. (빈 값으로 두지 않는다)
- 필드 순서가 곧 JSON key 순서다. 같은 입력이면 같은 바이트열이 나온다.
"""

from __future__ import annotations
from typing import Literal, Optional, Union
from pydantic import BaseModel, Field, computed_field

from ..verdict import FactorizationVerdict, PerfectVerdict, TilingVerdict


class Skipped(BaseModel):
    """계산하지 않은 항목. reason 에 이유를 적는다 (ceiling, 해당 없음 등)."""

    skipped: Literal[True] = Field(default=True, description="항상 True")
    reason: str = Field(..., description="건너뛴 이유")


def not_applicable(what: str = "this command") -> Skipped:
    return Skipped(reason=f"not applicable to {what}")


ObjectKind = Literal["tile", "code", "points"]


class ObjectStats(BaseModel):
    """집합 하나(tile / code / point set)의 불변량."""

    kind: ObjectKind = Field(..., description="객체 종류")
    q: int = Field(..., description="체의 위수")
    n: int = Field(..., description="벡터 길이")
    size: int = Field(..., description="원소 개수")
    rank: Union[int, Skipped] = Field(..., description="affine span 의 차원")
    full_rank: Union[bool, Skipped] = Field(..., description="rank == n")
    kernel_dim: Union[int, Skipped] = Field(..., description="q-kernel 의 F_q-차원")
    period_count: Union[int, Skipped] = Field(..., description="|per(S)|")
    projective: Union[bool, Skipped] = Field(..., description="스칼라배에 대해 닫혀 있는지")


class CheckResult(BaseModel):
    """체크리스트 항목 하나."""

    name: str = Field(..., description="항목 이름 (예: 'U projective')")
    passed: bool = Field(..., description="통과 여부")
    detail: str = Field(default="", description="측정값 요약")


class FormulaCheck(BaseModel):
    """공식 예측값과 독립 계산값의 비교."""

    quantity: Literal["rank", "kernel_dim", "period_count"] = Field(..., description="비교 대상")
    predicted: int = Field(..., description="tile 불변량으로부터 공식이 예측한 값")
    measured: int = Field(..., description="code 에서 직접 계산한 값")

    @computed_field
    @property
    def consistent(self) -> bool:
        return self.predicted == self.measured


class SearchSummary(BaseModel):
    """exhaustive_search 실행 요약."""

    geometry: Literal["projective", "affine"] = Field(..., description="기하의 종류")
    q: int = Field(..., description="체의 위수")
    n: int = Field(..., description="벡터 공간 차원")
    size_u: int = Field(..., description="찾는 |𝒰|")
    size_v: int = Field(..., description="찾는 |𝒱|")
    identity_lhs: int = Field(..., description="counting identity 좌변")
    identity_rhs: int = Field(..., description="counting identity 우변 (점 개수)")
    point_count: int = Field(..., description="기하의 점 개수")
    first_only: bool = Field(..., description="첫 해에서 멈췄는지")
    fix_first: bool = Field(..., description="첫 점을 𝒰 에 고정했는지 (대칭 축소)")
    solutions: int = Field(..., description="찾은 해의 개수")
    degenerate_solutions: int = Field(default=0, description="그 중 degenerate 한 해의 개수")


class StatsReport(BaseModel):
    """CLI 명령 하나의 최종 보고서."""

    command: str = Field(..., description="실행한 명령 이름")
    ok: bool = Field(..., description="모든 검증을 통과했는지 (exit code 0 과 동치)")
    objects: dict[str, ObjectStats] = Field(default_factory=dict, description="이름별 객체 불변량")
    checks: list[CheckResult] = Field(default_factory=list, description="체크리스트 결과")
    tiling: Union[TilingVerdict, Skipped] = Field(
        default_factory=not_applicable, description="타일링 검증 결과"
    )
    perfect: Union[PerfectVerdict, Skipped] = Field(
        default_factory=not_applicable, description="perfect code 검증 결과"
    )
    factorization: Union[FactorizationVerdict, Skipped] = Field(
        default_factory=not_applicable, description="factorization 검증 결과"
    )
    formulas: Union[list[FormulaCheck], Skipped] = Field(
        default_factory=not_applicable, description="rank/kernel/period 공식 교차검증"
    )
    search: Union[SearchSummary, Skipped] = Field(
        default_factory=not_applicable, description="탐색 요약"
    )
    outputs: dict[str, str] = Field(default_factory=dict, description="기록한 파일 경로")
    timings: Union[dict[str, float], Skipped] = Field(
        default_factory=lambda: Skipped(reason="timings disabled"),
        description="단계별 wall-clock 시간 (초). --timings 일 때만.",
    )
    notes: list[str] = Field(default_factory=list, description="기타 메모")

    def failed_checks(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
