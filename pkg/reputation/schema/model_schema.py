"""
모델 원시 파라미터, 파생 상수, 신념 관련 스키마 정의 - snake_case 사용
"""

import math
from enum import Enum
from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator


class Region(str, Enum):
    """신념 영역 (경계는 캐스케이드에 포함)"""

    DOWN_CASCADE = "DownCascade"
    EXPERIMENTATION = "Experimentation"
    UP_CASCADE = "UpCascade"


class Signal(str, Enum):
    """구매자 사적 신호"""

    H = "H"
    L = "L"


class Outcome(str, Enum):
    """구매 후 공개 결과 (구매가 없으면 NONE)"""

    G = "G"
    B = "B"
    NONE = "none"


class ModelParams(BaseModel):
    """모델 원시 파라미터 (v, p, q, c, delta) + 구매자 동점 처리 규칙"""

    v: float = Field(..., description="품질이 높을 때 구매자 가치")
    p: float = Field(..., description="게시 가격 (0 < p < v)")
    q: float = Field(..., description="사적 신호 정밀도 (1/2 < q < 1)")
    c: float = Field(..., description="고품질 비용 (c > 0)")
    delta: float = Field(..., description="판매자 할인율 (0 < delta < 1)")
    tie_break: Literal["buy", "pass"] = Field(
        "buy", description="사후 승산이 정확히 K 일 때 구매자 행동"
    )

    @field_validator("v")
    @classmethod
    def validate_v(cls, v):
        """v > 0 검증"""
        if not v > 0:
            raise ValueError("v > 0 이어야 합니다")
        return v

    @field_validator("q")
    @classmethod
    def validate_q(cls, v):
        """신호 정밀도 검증"""
        if not 0.5 < v < 1.0:
            raise ValueError("q 는 1/2 < q < 1 범위여야 합니다")
        return v

    @field_validator("c")
    @classmethod
    def validate_c(cls, v):
        """비용 검증"""
        if not v > 0:
            raise ValueError("c 는 c > 0 이어야 합니다")
        return v

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v):
        """할인율 검증"""
        if not 0.0 < v < 1.0:
            raise ValueError("delta 는 0 < delta < 1 범위여야 합니다")
        return v

    @model_validator(mode="after")
    def validate_price(self):
        """가격 검증 (0 < p < v)"""
        if not 0.0 < self.p < self.v:
            raise ValueError("p 는 0 < p < v 범위여야 합니다")
        return self

    class Config:
        """스키마 설정"""

        frozen = True
        extra = "forbid"


class Statics(BaseModel):
    """파생 상수: 신호 우도비, 승산/확률/로그승산 임계값, 근시안적 비용 비율"""

    z: float = Field(..., description="신호 우도비 q/(1-q)")
    K: float = Field(..., description="승산 임계값 p/(v-p)")
    r_under: float = Field(..., description="하방 캐스케이드 승산 임계값 K/z")
    r_over: float = Field(..., description="상방 캐스케이드 승산 임계값 K*z")
    lambda_under: float = Field(..., description="하방 캐스케이드 확률 임계값")
    lambda_over: float = Field(..., description="상방 캐스케이드 확률 임계값")
    eta: float = Field(..., description="근시안적 비용 비율 c/(p(2q-1))")
    ell_under: float = Field(..., description="하방 로그승산 임계값")
    ell_over: float = Field(..., description="상방 로그승산 임계값")

    @property
    def log_z(self) -> float:
        """한 번의 베이즈 스텝 크기 (로그승산)"""
        return math.log(self.z)

    class Config:
        """스키마 설정"""

        frozen = True


class Belief(BaseModel):
    """공개 신념 (확률과 로그승산을 함께 보관, 로그승산이 연산 기준)"""

    lam: float = Field(..., alias="lambda", description="현재 품질이 높을 확률")
    ell: float = Field(..., description="로그승산 log(lambda/(1-lambda))")

    @field_validator("lam")
    @classmethod
    def validate_lam(cls, v):
        """확률 범위 검증"""
        if not 0.0 <= v <= 1.0:
            raise ValueError("lambda 는 0 <= lambda <= 1 범위여야 합니다")
        return v

    @property
    def odds(self) -> float:
        """승산 r = lambda/(1-lambda)"""
        return math.exp(self.ell) if math.isfinite(self.ell) else (
            math.inf if self.ell > 0 else 0.0
        )

    @property
    def is_degenerate(self) -> bool:
        """lambda 가 0 또는 1 인 흡수 신념 여부"""
        return not math.isfinite(self.ell)

    class Config:
        """스키마 설정"""

        frozen = True
        populate_by_name = True
