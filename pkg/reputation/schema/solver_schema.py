"""
동적계획 솔버 관련 스키마 정의 - 격자, 옵션, 해
"""

import math
from typing import Optional, Tuple, Dict, Any

import numpy as np
from pydantic import BaseModel, Field, field_validator

from reputation.schema.model_schema import ModelParams, Statics


class Grid(BaseModel):
    """베이즈 스텝에 정렬된 로그승산 격자 (노드 0..2m, 내부 1..2m-1)"""

    m: int = Field(..., description="베이즈 스텝 당 분할 수")
    h: float = Field(..., description="노드 간격 log(z)/m")
    nodes: np.ndarray = Field(..., description="로그승산 노드 ell_k")

    @property
    def n_nodes(self) -> int:
        """전체 노드 수 2m+1"""
        return 2 * self.m + 1

    @property
    def interior(self) -> slice:
        """내부 노드 인덱스 범위 1..2m-1"""
        return slice(1, 2 * self.m)

    @property
    def ell_low(self) -> float:
        """하방 경계 로그승산"""
        return float(self.nodes[0])

    @property
    def ell_high(self) -> float:
        """상방 경계 로그승산"""
        return float(self.nodes[-1])

    @property
    def lambdas(self) -> np.ndarray:
        """노드별 확률 신념"""
        return 1.0 / (1.0 + np.exp(-self.nodes))

    def node_index(self, ell: float) -> int:
        """가장 가까운 노드 인덱스 (격자 밖은 양 끝으로 절단)"""
        if ell == -math.inf:
            return 0
        if ell == math.inf:
            return 2 * self.m
        k = int(round((ell - self.ell_low) / self.h))
        return min(max(k, 0), 2 * self.m)

    class Config:
        """스키마 설정"""

        frozen = True
        arbitrary_types_allowed = True


class SolveOptions(BaseModel):
    """가치 반복 옵션"""

    m: int = Field(50, description="격자 세분화")
    epsilon: float = Field(0.0, description="공개 떨림 (0 <= epsilon < 1/2)")
    tol: float = Field(1e-10, description="상한 노름 정지 임계값")
    max_iter: Optional[int] = Field(
        None, description="반복 상한 (미지정 시 10*ceil(log(tol)/log(delta)))"
    )

    @field_validator("m")
    @classmethod
    def validate_m(cls, v):
        """격자 세분화 검증"""
        if v < 1:
            raise ValueError("m 은 m >= 1 이어야 합니다")
        return v

    @field_validator("epsilon")
    @classmethod
    def validate_epsilon(cls, v):
        """떨림 검증"""
        if not 0.0 <= v < 0.5:
            raise ValueError("epsilon 은 0 <= epsilon < 1/2 범위여야 합니다")
        return v

    @field_validator("tol")
    @classmethod
    def validate_tol(cls, v):
        """허용 오차 검증"""
        if not v > 0:
            raise ValueError("tol 은 tol > 0 이어야 합니다")
        return v

    @field_validator("max_iter")
    @classmethod
    def validate_max_iter(cls, v):
        """반복 상한 검증"""
        if v is not None and v < 1:
            raise ValueError("max_iter 는 1 이상이어야 합니다")
        return v

    def resolved_max_iter(self, delta: float) -> int:
        """기본 반복 상한 10*ceil(log(tol)/log(delta))"""
        if self.max_iter is not None:
            return self.max_iter
        return 10 * max(1, math.ceil(math.log(self.tol) / math.log(delta)))

    class Config:
        """스키마 설정"""

        frozen = True
        extra = "forbid"


class ConcavityReport(BaseModel):
    """가치 함수 곡률 진단 결과"""

    is_monotone: bool = Field(..., description="1차 차분 >= -허용오차")
    is_concave_in_log_odds: bool = Field(..., description="2차 차분 <= 허용오차")
    max_violation: float = Field(..., description="가장 큰 위반 크기 (없으면 0)")
    max_monotone_violation: float = Field(0.0, description="단조성 최대 위반")
    max_concavity_violation: float = Field(0.0, description="오목성 최대 위반")


class Solution(BaseModel):
    """무한 지평 해 - 노드별 가치, 정책, 한계 유인, 유한차분 기울기"""

    params: ModelParams = Field(..., description="모델 파라미터")
    options: SolveOptions = Field(..., description="솔버 옵션")
    statics: Statics = Field(..., description="파생 상수")
    grid: Grid = Field(..., description="로그승산 격자")
    V: np.ndarray = Field(..., description="노드별 가치 (양 끝은 캐스케이드 값)")
    theta: np.ndarray = Field(..., description="노드별 품질 정책 {0,1}")
    Delta: np.ndarray = Field(..., description="노드별 한계 유인 (양 끝은 -c)")
    D: np.ndarray = Field(..., description="유한차분 기울기 V(l+dl)-V(l-dl) (양 끝 0)")
    v_down: float = Field(..., description="하방 캐스케이드 연속 가치")
    v_up: float = Field(..., description="상방 캐스케이드 연속 가치")
    iterations: int = Field(..., description="반복 횟수")
    sup_residual: float = Field(..., description="마지막 상한 노름 변화량")

    @property
    def cascades(self) -> Tuple[float, float]:
        """(v_down, v_up)"""
        return self.v_down, self.v_up

    def value_at(self, lam: float) -> float:
        """신념 lam 에서의 가치 (캐스케이드는 상수, 내부는 가장 가까운 노드)"""
        if lam <= self.statics.lambda_under:
            return self.v_down
        if lam >= self.statics.lambda_over:
            return self.v_up
        ell = math.log(lam) - math.log1p(-lam)
        k = min(max(self.grid.node_index(ell), 1), 2 * self.grid.m - 1)
        return float(self.V[k])

    def metadata(self) -> Dict[str, Any]:
        """직렬화용 메타데이터"""
        return {
            "params": self.params.model_dump(),
            "options": self.options.model_dump(),
            "statics": self.statics.model_dump(),
            "m": self.grid.m,
            "h": self.grid.h,
            "v_down": self.v_down,
            "v_up": self.v_up,
            "iterations": self.iterations,
            "sup_residual": self.sup_residual,
        }

    class Config:
        """스키마 설정"""

        frozen = True
        arbitrary_types_allowed = True


class FiniteSolution(BaseModel):
    """유한 지평 해 - 기간별 가치/정책 (행 t-1 이 기간 t)"""

    params: ModelParams = Field(..., description="모델 파라미터")
    options: SolveOptions = Field(..., description="솔버 옵션")
    grid: Grid = Field(..., description="로그승산 격자 (무한 지평과 동일)")
    T: int = Field(..., description="지평 길이")
    V: np.ndarray = Field(..., description="(T, 2m+1) 기간별 가치")
    theta: np.ndarray = Field(..., description="(T, 2m+1) 기간별 정책")
    Delta: np.ndarray = Field(..., description="(T, 2m+1) 기간별 한계 유인")
    v_down: np.ndarray = Field(..., description="기간별 하방 캐스케이드 가치")
    v_up: np.ndarray = Field(..., description="기간별 상방 캐스케이드 가치")
    tie_break: str = Field(..., description="사용한 구매자 동점 처리 규칙")
    seller_tie_break: str = Field("theta=0", description="판매자 동점 처리 (Delta=0 이면 0)")

    def V_at(self, t: int) -> np.ndarray:
        """기간 t (1..T) 의 가치 벡터"""
        return self.V[t - 1]

    class Config:
        """스키마 설정"""

        frozen = True
        arbitrary_types_allowed = True
