"""
검증 결과(verdict) 스키마 정의

- tiling / perfect code / factorization 검증기는 모두 여기의 모델을 돌려준다.
- 검증 "실패"는 예외가 아니라 valid=False + reason + witness 로 표현한다.
- witness 벡터는 좌표 리스트(list[int])로 담는다. (JSON 보고서에 그대로 실린다)
"""

from __future__ import annotations
from typing import Literal, Optional
from pydantic import BaseModel, Field


# =========================
# 타입 정의
# =========================

TilingFailure = Literal[
    "ok",           # 타일링
    "cardinality",  # |U|·|V| != q^n
    "collision",    # u1+v1 = u2+v2, (u1,v1) != (u2,v2)
    "uncovered",    # 어떤 벡터도 u+v 로 표현되지 않음
]

PerfectFailure = Literal[
    "ok",
    "collision",    # 두 codeword 의 ball 이 겹침
    "uncovered",    # 어떤 ball 에도 속하지 않는 벡터가 있음
]

FactorizationFailure = Literal[
    "ok",
    "uncovered",         # 바깥 점 x 를 지나는 연결선이 없음
    "multiply_covered",  # 바깥 점 x 를 지나는 연결선이 2개 이상
    "line_hits_tile",    # 연결선이 자기 양 끝이 아닌 𝒰 ∪ 𝒱 의 점을 지남
]

Coords = list[int]


class TilingVerdict(BaseModel):
    """
    verify_tiling 결과.

    - reason == "collision" 이면 witness_u1/v1/u2/v2 와 witness_sum 이 채워진다.
    - reason == "uncovered" 이면 uncovered 가 채워진다.
    """

    valid: bool = Field(..., description="(U, V) 가 F_q^n 의 타일링인지 여부")
    reason: TilingFailure = Field(..., description="실패 사유. 성공이면 'ok'.")
    q: int = Field(..., description="체의 위수")
    n: int = Field(..., description="벡터 길이")
    size_u: int = Field(..., description="|U|")
    size_v: int = Field(..., description="|V|")
    space_size: int = Field(..., description="q^n")

    witness_u1: Optional[Coords] = Field(default=None, description="충돌 witness 의 첫 번째 u")
    witness_v1: Optional[Coords] = Field(default=None, description="충돌 witness 의 첫 번째 v")
    witness_u2: Optional[Coords] = Field(default=None, description="충돌 witness 의 두 번째 u")
    witness_v2: Optional[Coords] = Field(default=None, description="충돌 witness 의 두 번째 v")
    witness_sum: Optional[Coords] = Field(default=None, description="두 번 표현되는 벡터 u1+v1 = u2+v2")
    uncovered: Optional[Coords] = Field(default=None, description="표현되지 않는 벡터 (key 최소)")

    # =========================
    # 편의 메서드
    # =========================

    def is_valid(self) -> bool:
        return self.valid

    def summary(self) -> str:
        if self.valid:
            return f"tiling of F_{self.q}^{self.n} (|U|={self.size_u}, |V|={self.size_v})"
        if self.reason == "cardinality":
            return f"|U|·|V| = {self.size_u * self.size_v} != {self.space_size} = q^n"
        if self.reason == "collision":
            return f"{self.witness_sum} = {self.witness_u1}+{self.witness_v1} = {self.witness_u2}+{self.witness_v2}"
        return f"{self.uncovered} is not of the form u+v"


class PerfectVerdict(BaseModel):
    """
    verify_perfect 결과.

    - 충돌이 있으면 collision_witness 와, 그 벡터를 덮는 두 codeword 를 담는다.
    - 충돌이 없는데 덮이지 않은 벡터가 있으면 uncovered_witness (key 최소) 를 담는다.
    - uncovered_count 는 충돌이 없을 때만 정확하다. 충돌이 있으면 None.
    """

    valid: bool = Field(..., description="C 가 r-perfect code 인지 여부")
    reason: PerfectFailure = Field(..., description="실패 사유. 성공이면 'ok'.")
    q: int = Field(..., description="체의 위수")
    length: int = Field(..., description="부호 길이 N")
    radius: int = Field(..., description="ball 반지름 r")
    code_size: int = Field(..., description="|C|")
    ball_size: int = Field(..., description="|B_r|")
    space_size: int = Field(..., description="q^N")

    uncovered_count: Optional[int] = Field(default=None, description="어느 ball 에도 속하지 않는 벡터 수")
    collision_witness: Optional[Coords] = Field(default=None, description="두 ball 에 동시에 속하는 벡터")
    collision_codewords: Optional[list[Coords]] = Field(
        default=None,
        description="collision_witness 를 덮는 codeword 두 개 (key 순)",
    )
    uncovered_witness: Optional[Coords] = Field(default=None, description="덮이지 않은 벡터 (key 최소)")

    def is_valid(self) -> bool:
        return self.valid

    def summary(self) -> str:
        head = f"|C|·|B_{self.radius}| = {self.code_size}·{self.ball_size}"
        if self.valid:
            return f"{self.radius}-perfect code, {head} = {self.space_size}"
        if self.reason == "collision":
            return f"balls overlap at {self.collision_witness}"
        return f"{self.uncovered_count} vectors uncovered, first {self.uncovered_witness}"


class FactorizationVerdict(BaseModel):
    """
    verify_factorization 결과.

    - degenerate: 𝒰 ∪ 𝒱 가 모든 점을 덮어서 조건이 공허하게 성립하는 경우.
    - witness 는 문제가 되는 점의 대표원, witness_lines 는 그 점을 지나는 (u, v) 쌍들.
    """

    valid: bool = Field(..., description="(𝒰, 𝒱) 가 factorization 인지 여부")
    reason: FactorizationFailure = Field(..., description="실패 사유. 성공이면 'ok'.")
    geometry: Literal["projective", "affine"] = Field(..., description="기하의 종류")
    q: int = Field(..., description="체의 위수")
    n: int = Field(..., description="벡터 공간 차원")
    size_u: int = Field(..., description="|𝒰|")
    size_v: int = Field(..., description="|𝒱|")
    point_count: int = Field(..., description="기하 전체의 점 개수")
    degenerate: bool = Field(default=False, description="𝒰 ∪ 𝒱 바깥에 점이 하나도 없음")

    witness: Optional[Coords] = Field(default=None, description="문제가 되는 점")
    witness_count: Optional[int] = Field(default=None, description="witness 를 지나는 연결선 개수")
    witness_lines: Optional[list[list[Coords]]] = Field(
        default=None,
        description="witness 를 지나는 (u, v) 쌍들 (최대 2개)",
    )

    def is_valid(self) -> bool:
        return self.valid

    def summary(self) -> str:
        tag = " (degenerate)" if self.degenerate else ""
        if self.valid:
            return f"{self.geometry} factorization, |U|={self.size_u}, |V|={self.size_v}{tag}"
        if self.reason == "line_hits_tile":
            return f"line {self.witness_lines} passes through tile point {self.witness}"
        return f"point {self.witness} lies on {self.witness_count} connecting lines"
