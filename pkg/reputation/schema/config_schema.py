"""
실행 설정 스키마 정의 - 섹션별 pydantic 모델 (알 수 없는 키 거부)
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from reputation.schema.model_schema import ModelParams
from reputation.schema.solver_schema import SolveOptions
from reputation.utils.config import get_settings

OutputFormat = Literal["csv", "json", "both", "xlsx"]


class SimConfig(BaseModel):
    """시뮬레이션 설정"""

    n_paths: int = Field(1000, description="경로 수")
    T_max: int = Field(200, description="이탈 시간 검열 기간")
    horizon: int = Field(200, description="후생 계산 기간")
    seed: int = Field(0, description="RNG 시드")
    lambda0: float = Field(0.40, description="초기 신념")
    n_export_paths: int = Field(10, description="CSV 로 내보낼 경로 수")
    figure_paths: int = Field(10, description="그림용 경로 수")
    figure_periods: int = Field(10, description="그림용 경로 기간")

    @field_validator("n_paths", "T_max", "horizon", "figure_paths", "figure_periods")
    @classmethod
    def validate_positive(cls, v):
        """양의 정수 검증"""
        if v < 1:
            raise ValueError("1 이상이어야 합니다")
        return v

    @field_validator("n_export_paths")
    @classmethod
    def validate_export(cls, v):
        """내보낼 경로 수 검증"""
        if v < 0:
            raise ValueError("0 이상이어야 합니다")
        return v

    @field_validator("lambda0")
    @classmethod
    def validate_lambda0(cls, v):
        """초기 신념 검증"""
        if not 0.0 < v < 1.0:
            raise ValueError("lambda0 는 0 < lambda0 < 1 범위여야 합니다")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v):
        """시드 검증"""
        if v < 0:
            raise ValueError("seed 는 0 이상이어야 합니다")
        return v

    class Config:
        """스키마 설정"""

        extra = "forbid"


class SweepConfig(BaseModel):
    """스윕 설정"""

    axis: Literal["v", "p", "q", "c", "delta", "epsilon"] = Field("c", description="스윕 축")
    values: List[float] = Field(default_factory=list, description="값 목록")
    workers: int = Field(1, description="병렬 작업자 수")

    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v):
        """작업자 수 검증"""
        if v < 1:
            raise ValueError("workers 는 1 이상이어야 합니다")
        return v

    class Config:
        """스키마 설정"""

        extra = "forbid"


class FiniteConfig(BaseModel):
    """유한 지평 설정"""

    T: int = Field(100, description="지평 길이")
    T_list: List[int] = Field(default_factory=lambda: [1, 2, 5, 20, 100], description="수렴 진단 지평 목록")

    @field_validator("T")
    @classmethod
    def validate_T(cls, v):
        """지평 검증"""
        if v < 1:
            raise ValueError("T 는 1 이상이어야 합니다")
        return v

    @field_validator("T_list")
    @classmethod
    def validate_T_list(cls, v):
        """지평 목록 검증"""
        if any(t < 1 for t in v):
            raise ValueError("T_list 의 모든 값은 1 이상이어야 합니다")
        return v

    class Config:
        """스키마 설정"""

        extra = "forbid"


class PriceConfig(BaseModel):
    """유연 가격 설정"""

    domain: List[float] = Field(default_factory=lambda: [0.01, 0.99], description="절단 신념 구간")
    m: int = Field(50, description="격자 세분화")
    tol: float = Field(1e-10, description="가치 반복 허용 오차")
    tol_delta: float = Field(1e-3, description="delta_bar 이분 탐색 허용 오차")
    check_band: Optional[List[float]] = Field(None, description="풀링 점검 신념 구간")
    n_probes: int = Field(0, description="단조성 점검 탐침 수")
    compute_delta_bar: bool = Field(True, description="delta_bar 계산 여부")

    @model_validator(mode="after")
    def validate_intervals(self):
        """구간 검증"""
        for name in ("domain", "check_band"):
            interval = getattr(self, name)
            if interval is None:
                continue
            if len(interval) != 2 or not 0.0 < interval[0] < interval[1] < 1.0:
                raise ValueError(f"{name} 는 0 < 하한 < 상한 < 1 인 두 값이어야 합니다")
        if self.m < 1:
            raise ValueError("m 은 1 이상이어야 합니다")
        if not 0.0 < self.tol_delta < 0.5:
            raise ValueError("tol_delta 는 0 < tol_delta < 1/2 범위여야 합니다")
        return self

    class Config:
        """스키마 설정"""

        extra = "forbid"


class OutcomeConfig(BaseModel):
    """공개 결과 관측 설정"""

    rho: float = Field(0.75, description="결과 정밀도")
    rho_values: List[float] = Field(
        default_factory=lambda: [0.55, 0.65, 0.75, 0.85], description="단조성 점검 rho 목록"
    )

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, v):
        """결과 정밀도 검증"""
        if not 0.5 < v <= 1.0:
            raise ValueError("rho 는 1/2 < rho <= 1 범위여야 합니다")
        return v

    @field_validator("rho_values")
    @classmethod
    def validate_rho_values(cls, v):
        """rho 목록 검증 (완전 공개 rho=1 제외)"""
        if any(not 0.5 < rho < 1.0 for rho in v):
            raise ValueError("rho_values 는 모두 1/2 < rho < 1 범위여야 합니다")
        return v

    class Config:
        """스키마 설정"""

        extra = "forbid"


class OutputConfig(BaseModel):
    """출력 설정"""

    dir: Optional[str] = Field(None, description="출력 디렉토리 (--out 이 우선)")
    format: OutputFormat = Field(
        default_factory=lambda: get_settings().DEFAULT_FORMAT, description="출력 포맷"
    )

    class Config:
        """스키마 설정"""

        extra = "forbid"


class RunConfig(BaseModel):
    """실행 설정 전체"""

    model: ModelParams = Field(..., description="모델 파라미터")
    solver: SolveOptions = Field(default_factory=SolveOptions, description="솔버 옵션")
    sim: SimConfig = Field(default_factory=SimConfig, description="시뮬레이션 옵션")
    sweep: SweepConfig = Field(default_factory=SweepConfig, description="스윕 축")
    finite: FiniteConfig = Field(default_factory=FiniteConfig, description="유한 지평 옵션")
    price: PriceConfig = Field(default_factory=PriceConfig, description="유연 가격 옵션")
    outcome: OutcomeConfig = Field(default_factory=OutcomeConfig, description="결과 관측 옵션")
    output: OutputConfig = Field(default_factory=OutputConfig, description="출력 옵션")

    class Config:
        """스키마 설정"""

        extra = "forbid"
        protected_namespaces = ()
