"""
신념 경로, 투자 패턴, 후생 관련 스키마 정의
"""

from enum import Enum
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field


class Pattern(str, Enum):
    """투자 집합 분류"""

    EARLY_RESOLUTION = "EarlyResolution"
    DOUBLE_HUMP = "DoubleHump"
    NO_INVESTMENT = "NoInvestment"
    OTHER = "Other"


class Path(BaseModel):
    """시뮬레이션된 신념/품질/행동 궤적"""

    seed: int = Field(..., description="RNG 시드")
    path_id: int = Field(0, description="경로 번호 (시드와 함께 스트림 결정)")
    lambda_series: np.ndarray = Field(..., description="기간 시작 신념 (길이 n+1)")
    ell_series: np.ndarray = Field(..., description="기간 시작 로그승산 (길이 n+1)")
    theta_series: np.ndarray = Field(..., description="실현 품질 (길이 n)")
    action_series: np.ndarray = Field(..., description="구매 여부 (길이 n)")
    absorbed_at: Optional[int] = Field(None, description="캐스케이드 진입 기간 (없으면 None)")
    absorbed_to: Literal["up", "down", "none"] = Field("none", description="흡수 방향")

    @property
    def n_periods(self) -> int:
        """진행된 기간 수"""
        return int(self.action_series.shape[0])

    class Config:
        """스키마 설정"""

        frozen = True
        arbitrary_types_allowed = True


class IndexInterval(BaseModel):
    """노드 인덱스 구간 (양 끝 포함) 과 대응 신념"""

    start: int = Field(..., description="시작 노드 인덱스")
    end: int = Field(..., description="끝 노드 인덱스")
    lambda_start: Optional[float] = Field(None, description="시작 노드 신념")
    lambda_end: Optional[float] = Field(None, description="끝 노드 신념")

    @property
    def size(self) -> int:
        """구간 내 노드 수"""
        return self.end - self.start + 1


class PatternReport(BaseModel):
    """투자 집합 {Delta > 0} 의 연결 성분과 분류"""

    components: List[IndexInterval] = Field(default_factory=list, description="투자 성분")
    classification: Pattern = Field(..., description="ER / DH / 무투자 / 기타")
    gap_intervals: List[IndexInterval] = Field(default_factory=list, description="성분 사이 간격")
    drift_directions: List[Literal["up", "down"]] = Field(
        default_factory=list, description="성분별 표류 방향 (theta >= 1/2 이면 up)"
    )


class HittingStats(BaseModel):
    """실험 영역 이탈 시간 통계"""

    n_paths: int = Field(..., description="경로 수")
    T_max: int = Field(..., description="검열 기간")
    mean_tau: Optional[float] = Field(None, description="이탈 경로의 평균 이탈 시간")
    se_tau: Optional[float] = Field(None, description="평균 이탈 시간 표준오차")
    median_tau: Optional[float] = Field(None, description="이탈 경로의 중앙 이탈 시간")
    mean_tau_up: Optional[float] = Field(None, description="상방 흡수 경로의 평균 이탈 시간")
    fraction_up: float = Field(..., description="상방 흡수 비율")
    fraction_down: float = Field(..., description="하방 흡수 비율")
    fraction_censored: float = Field(..., description="T_max 까지 미흡수 비율")


class WelfareReport(BaseModel):
    """할인 잉여 Monte Carlo 추정 (평균 ± 표준오차)"""

    n_paths: int = Field(..., description="경로 수")
    horizon: int = Field(..., description="기간 수")
    buyer_mean: float = Field(..., description="구매자 잉여 평균")
    buyer_se: float = Field(..., description="구매자 잉여 표준오차")
    seller_mean: float = Field(..., description="판매자 이윤 평균")
    seller_se: float = Field(..., description="판매자 이윤 표준오차")
    total_mean: float = Field(..., description="총잉여 평균")
    total_se: float = Field(..., description="총잉여 표준오차")
