"""
확장 모형 스키마 정의 - 유연 가격, 공개 결과 관측, 비교정학 스윕
"""

import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from reputation.schema.model_schema import ModelParams, Statics
from reputation.schema.solver_schema import Grid, SolveOptions


class PriceSet(BaseModel):
    """신념 lambda 에서 실험을 유도하는 가격 구간 (p_low, p_high)"""

    lam: float = Field(..., description="신념")
    p_low: float = Field(..., description="실험 유도 가격 하한 (불포함)")
    p_high: float = Field(..., description="실험 유도 가격 상한")

    def contains(self, price: float) -> bool:
        """열린 구간 (p_low, p_high) 포함 여부"""
        return self.p_low < price < self.p_high


class FlexParams(BaseModel):
    """가격을 제외한 원시 파라미터 (v, q, c, delta)"""

    v: float = Field(..., description="품질이 높을 때 구매자 가치")
    q: float = Field(..., description="사적 신호 정밀도")
    c: float = Field(..., description="고품질 비용")
    delta: float = Field(..., description="판매자 할인율")

    @field_validator("v", "c")
    @classmethod
    def validate_positive(cls, v):
        """양수 검증"""
        if not v > 0:
            raise ValueError("v, c 는 양수여야 합니다")
        return v

    @field_validator("q")
    @classmethod
    def validate_q(cls, v):
        """신호 정밀도 검증"""
        if not 0.5 < v < 1.0:
            raise ValueError("q 는 1/2 < q < 1 범위여야 합니다")
        return v

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v):
        """할인율 검증"""
        if not 0.0 < v < 1.0:
            raise ValueError("delta 는 0 < delta < 1 범위여야 합니다")
        return v

    @classmethod
    def from_model(cls, params: ModelParams) -> "FlexParams":
        """ModelParams 에서 가격을 뺀 부분만 취함"""
        return cls(v=params.v, q=params.q, c=params.c, delta=params.delta)

    @property
    def z(self) -> float:
        """신호 우도비"""
        return self.q / (1.0 - self.q)

    class Config:
        """스키마 설정"""

        frozen = True
        extra = "forbid"


class FlexSolution(BaseModel):
    """유연 가격 해 - 절단 로그승산 격자 위 가치, 품질, 가격, 풀링 여부"""

    params: FlexParams = Field(..., description="가격 제외 파라미터")
    m: int = Field(..., description="베이즈 스텝 당 분할 수")
    h: float = Field(..., description="노드 간격")
    nodes: np.ndarray = Field(..., description="로그승산 노드")
    lambdas: np.ndarray = Field(..., description="노드별 신념")
    V: np.ndarray = Field(..., description="노드별 가치")
    theta: np.ndarray = Field(..., description="노드별 품질 (풀링 노드는 0)")
    price: np.ndarray = Field(..., description="노드별 가격")
    pooling: np.ndarray = Field(..., description="노드별 풀링 여부")
    p_low: np.ndarray = Field(..., description="노드별 가격 하한")
    p_high: np.ndarray = Field(..., description="노드별 가격 상한")
    iterations: int = Field(..., description="반복 횟수")
    sup_residual: float = Field(..., description="마지막 상한 노름 변화량")
    no_pooling: bool = Field(..., description="점검 구간 전체에서 풀링이 없는지")
    check_band: Optional[List[float]] = Field(None, description="풀링 점검 신념 구간")

    class Config:
        """스키마 설정"""

        frozen = True
        arbitrary_types_allowed = True


class ThresholdSearch(BaseModel):
    """이분 탐색 결과"""

    found: bool = Field(..., description="구간 내 임계값 존재 여부")
    threshold: Optional[float] = Field(None, description="추정 임계값 (구간 중점)")
    bracket: Optional[List[float]] = Field(None, description="최종 구간 [lo, hi]")
    steps: int = Field(0, description="이분 단계 수")
    evaluations: List[Dict[str, Any]] = Field(default_factory=list, description="(x, 판정) 기록")
    monotone_violations: int = Field(0, description="단조성 위반 횟수")
    reason: Optional[str] = Field(None, description="미발견 사유")


class OutcomeParams(BaseModel):
    """공개 결과 정밀도 rho 와 우도비 w"""

    rho: float = Field(..., description="결과 정밀도 (1/2 < rho <= 1)")

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, v):
        """결과 정밀도 검증"""
        if not 0.5 < v <= 1.0:
            raise ValueError("rho 는 1/2 < rho <= 1 범위여야 합니다")
        return v

    @property
    def w(self) -> float:
        """결과 우도비 (rho=1 이면 inf)"""
        if self.rho == 1.0:
            return math.inf
        return self.rho / (1.0 - self.rho)

    class Config:
        """스키마 설정"""

        frozen = True


class OutcomeSolution(BaseModel):
    """공개 결과 관측 모형의 해 (기준 격자, 보간 평가)"""

    params: ModelParams = Field(..., description="모델 파라미터")
    outcome: OutcomeParams = Field(..., description="결과 정밀도")
    options: SolveOptions = Field(..., description="솔버 옵션")
    statics: Statics = Field(..., description="파생 상수")
    grid: Grid = Field(..., description="기준 격자")
    V: np.ndarray = Field(..., description="노드별 가치")
    theta: np.ndarray = Field(..., description="노드별 정책")
    Delta: np.ndarray = Field(..., description="노드별 한계 유인 (정확한 기대값 전개)")
    Delta_printed: np.ndarray = Field(..., description="대안 표기식으로 계산한 한계 유인")
    V_good: np.ndarray = Field(..., description="노드별 V(lambda^{+G})")
    V_bad: np.ndarray = Field(..., description="노드별 V(lambda^{+B})")
    V_pass: np.ndarray = Field(..., description="노드별 V(lambda^-)")
    v_down: float = Field(..., description="하방 캐스케이드 가치")
    v_up: float = Field(..., description="상방 캐스케이드 가치")
    iterations: int = Field(..., description="반복 횟수")
    sup_residual: float = Field(..., description="마지막 상한 노름 변화량")
    display_discrepancy: float = Field(..., description="두 한계 유인 식의 내부 상한 노름 차")

    class Config:
        """스키마 설정"""

        frozen = True
        arbitrary_types_allowed = True


class SweepRow(BaseModel):
    """스윕 한 점의 결과"""

    index: int = Field(..., description="점 번호")
    axis: str = Field(..., description="변화시킨 파라미터")
    value: float = Field(..., description="파라미터 값")
    z: float = Field(..., description="신호 우도비")
    lambda_under: float = Field(..., description="하방 임계값")
    lambda_over: float = Field(..., description="상방 임계값")
    classification: str = Field(..., description="투자 패턴")
    n_components: int = Field(..., description="투자 성분 수")
    investment_nodes: int = Field(..., description="투자 노드 수")
    investment_lambda_low: Optional[float] = Field(None, description="투자 집합 최저 신념")
    investment_lambda_high: Optional[float] = Field(None, description="투자 집합 최고 신념")
    max_Delta: float = Field(..., description="내부 최대 한계 유인")
    iterations: int = Field(..., description="가치 반복 횟수")
    error: Optional[str] = Field(None, description="이 점에서 발생한 오류")
