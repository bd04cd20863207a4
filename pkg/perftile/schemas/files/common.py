"""
TileFile 헤더 스키마

파일 형식:
    1행: q p k n count kind
    2행: modulus a0 a1 ... ak      (k > 1 일 때만, 낮은 차수부터, monic)
    이후: 한 행에 n 개의 정수, 공백 하나로 구분, key 오름차순, 중복 없음
"""

from __future__ import annotations
from typing import Literal, Optional
from pydantic import BaseModel, Field, model_validator


FileKind = Literal["tile", "code", "points"]


class TileHeader(BaseModel):
    q: int = Field(..., ge=2, description="체의 위수 (= p^k)")
    p: int = Field(..., ge=2, description="체의 표수")
    k: int = Field(..., ge=1, description="확대 차수")
    n: int = Field(..., ge=1, description="각 행의 길이")
    count: int = Field(..., ge=0, description="행 개수")
    kind: FileKind = Field(..., description="tile / code / points")
    modulus: Optional[tuple[int, ...]] = Field(
        default=None,
        description="k > 1 일 때 F_q 를 만든 monic 기약다항식 계수 (낮은 차수부터)",
    )

    @model_validator(mode="after")
    def _check_consistency(self) -> "TileHeader":
        if self.p ** self.k != self.q:
            raise ValueError(f"q = {self.q} is not p^k = {self.p}^{self.k}")
        if self.k > 1:
            if self.modulus is None:
                raise ValueError("extension field header needs a modulus line")
            if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
                raise ValueError(f"modulus must be monic of degree {self.k}")
            if any(not (0 <= a < self.p) for a in self.modulus):
                raise ValueError(f"modulus coefficients must lie in [0, {self.p})")
        elif self.modulus is not None and self.modulus != (0, 1):
            raise ValueError("prime field header must not carry a modulus")
        return self

    def header_lines(self) -> list[str]:
        lines = [f"{self.q} {self.p} {self.k} {self.n} {self.count} {self.kind}"]
        if self.k > 1:
            lines.append("modulus " + " ".join(str(a) for a in self.modulus))
        return lines

    def same_space(self, other: "TileHeader") -> bool:
        """같은 체(같은 modulus 포함), 같은 n 인지."""
        return (
            self.q == other.q
            and self.p == other.p
            and self.k == other.k
            and self.n == other.n
            and (self.k == 1 or self.modulus == other.modulus)
        )
