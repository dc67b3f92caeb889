"""
모델 핵심 로직 - 파생 상수, 구매자 정적 결정, 행동 우도, 행동 기반 베이즈 갱신
"""

import math
from typing import Tuple
import logging

from pydantic import ValidationError

from reputation.schema.model_schema import (
    Belief,
    ModelParams,
    Region,
    Signal,
    Statics,
)
from reputation.utils.error_handler import (
    DomainError,
    InvalidParameterError,
    pydantic_error_details,
)

logger = logging.getLogger(__name__)


def make_params(**fields) -> ModelParams:
    """ModelParams 생성 (검증 실패 시 InvalidParameterError 로 변환)"""
    try:
        return ModelParams(**fields)
    except ValidationError as e:
        details = pydantic_error_details(e)
        message = "; ".join(item["message"] for item in details)
        raise InvalidParameterError(
            f"모델 파라미터 검증 실패: {message}", details={"errors": details}
        )


def _check_invariants(params: ModelParams) -> None:
    """model_construct 등으로 검증을 우회한 파라미터 재검증"""
    if not (0.0 < params.p < params.v):
        raise InvalidParameterError("p 는 0 < p < v 범위여야 합니다")
    if not (0.5 < params.q < 1.0):
        raise InvalidParameterError("q 는 1/2 < q < 1 범위여야 합니다")
    if not (0.0 < params.delta < 1.0):
        raise InvalidParameterError("delta 는 0 < delta < 1 범위여야 합니다")
    if not params.c > 0:
        raise InvalidParameterError("c 는 c > 0 이어야 합니다")


def derive_statics(params: ModelParams) -> Statics:
    """닫힌 형태로 파생 상수 계산"""
    _check_invariants(params)

    z = params.q / (1.0 - params.q)
    K = params.p / (params.v - params.p)
    r_under = K / z
    r_over = K * z
    log_z = math.log(z)
    ell_mid = math.log(K)

    return Statics(
        z=z,
        K=K,
        r_under=r_under,
        r_over=r_over,
        lambda_under=r_under / (1.0 + r_under),
        lambda_over=r_over / (1.0 + r_over),
        eta=params.c / (params.p * (2.0 * params.q - 1.0)),
        # 로그승산 폭이 정확히 2 log z 가 되도록 중심에서 대칭으로 구성
        ell_under=ell_mid - log_z,
        ell_over=ell_mid + log_z,
    )


def belief_from_probability(lam: float) -> Belief:
    """확률에서 신념 생성 (0, 1 은 로그승산 -inf, +inf)"""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda 는 [0, 1] 범위여야 합니다: {lam}")
    if lam == 0.0:
        return Belief(lam=0.0, ell=-math.inf)
    if lam == 1.0:
        return Belief(lam=1.0, ell=math.inf)
    return Belief(lam=lam, ell=math.log(lam) - math.log1p(-lam))


def belief_from_log_odds(ell: float) -> Belief:
    """로그승산에서 신념 생성"""
    if math.isnan(ell):
        raise DomainError("로그승산이 nan 입니다")
    if ell == -math.inf:
        return Belief(lam=0.0, ell=ell)
    if ell == math.inf:
        return Belief(lam=1.0, ell=ell)
    # 수치 안정 로지스틱
    if ell >= 0:
        lam = 1.0 / (1.0 + math.exp(-ell))
    else:
        e = math.exp(ell)
        lam = e / (1.0 + e)
    return Belief(lam=lam, ell=ell)


def region_of(belief: Belief, statics: Statics) -> Region:
    """신념 영역 분류 (경계는 캐스케이드에 포함)"""
    if belief.lam <= statics.lambda_under:
        return Region.DOWN_CASCADE
    if belief.lam >= statics.lambda_over:
        return Region.UP_CASCADE
    return Region.EXPERIMENTATION


def buyer_action(
    r: float, signal: Signal, statics: Statics, tie_break: str = "buy"
) -> int:
    """
    구매자 정적 최적 반응

    Args:
        r: 사전 승산 (r > 0)
        signal: 사적 신호 H/L
        statics: 파생 상수
        tie_break: 사후 승산 == K 일 때 행동 ("buy" 또는 "pass")

    Returns:
        int: 구매 1, 불구매 0
    """
    if not r > 0:
        raise DomainError(f"사전 승산은 양수여야 합니다: {r}")
    posterior = r * statics.z if Signal(signal) == Signal.H else r / statics.z
    # 반올림 오차 수준의 차이는 무차별로 본다
    if math.isclose(posterior, statics.K, rel_tol=1e-12, abs_tol=0.0):
        return 1 if tie_break == "buy" else 0
    return 1 if posterior > statics.K else 0


def action_likelihoods(
    region: Region, q: float, epsilon: float = 0.0
) -> Tuple[float, float]:
    """
    품질별 구매 확률 (psi1, psi0)

    캐스케이드에서는 공개 떨림 epsilon 이 양쪽 행동에 양의 확률을 부여한다.
    """
    if region == Region.UP_CASCADE:
        return 1.0 - epsilon, 1.0 - epsilon
    if region == Region.DOWN_CASCADE:
        return epsilon, epsilon
    return q, 1.0 - q


def purchase_probability(
    region: Region, theta: float, q: float, epsilon: float = 0.0
) -> float:
    """혼합 품질 theta 에서의 구매 확률 gamma = psi0 + theta (psi1 - psi0)"""
    psi1, psi0 = action_likelihoods(region, q, epsilon)
    return psi0 + theta * (psi1 - psi0)


def bayes_action_update(belief: Belief, action: int, statics: Statics) -> Belief:
    """행동 기반 베이즈 갱신 (실험 영역에서만 로그승산 ±log z 이동)"""
    if action not in (0, 1):
        raise DomainError(f"행동은 0 또는 1 이어야 합니다: {action}")
    if belief.is_degenerate:
        return belief
    if region_of(belief, statics) != Region.EXPERIMENTATION:
        return belief
    step = statics.log_z if action == 1 else -statics.log_z
    return belief_from_log_odds(belief.ell + step)


def myopic_policy(region: Region, eta: float) -> int:
    """근시안적 기준 정책 (eta == 1 이면 판매자 동점 처리로 0)"""
    if eta <= 0:
        raise InvalidParameterError(f"eta 는 양수여야 합니다: {eta}")
    if region != Region.EXPERIMENTATION:
        return 0
    return 1 if eta < 1.0 else 0
