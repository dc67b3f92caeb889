"""
유연 가격 확장 - 실험 유도 가격 구간, 캐스케이드 없는 가격 동적계획, 인내 임계값 탐색
"""

import math
from typing import Callable, List, Optional, Tuple
import logging

import numpy as np
import pandas as pd
from pydantic import ValidationError

from reputation.schema.extension_schema import (
    FlexParams,
    FlexSolution,
    PriceSet,
    ThresholdSearch,
)
from reputation.schema.model_schema import ModelParams
from reputation.utils.error_handler import (
    ConvergenceError,
    DomainError,
    InvalidParameterError,
    pydantic_error_details,
)

logger = logging.getLogger(__name__)

DEFAULT_DOMAIN = (0.01, 0.99)


def price_set(lam: float, v: float, z: float) -> PriceSet:
    """
    신념 lambda 에서 실험(신호 추종 구매)을 유도하는 가격 구간

    r/z < K(p) < r z, K(p) = p/(v-p) 를 p 에 대해 풀어 얻는다.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda 는 0 < lambda < 1 범위여야 합니다: {lam}")
    if not z > 1.0:
        raise InvalidParameterError(f"z 는 1 보다 커야 합니다: {z}")
    r = lam / (1.0 - lam)
    low, high = r / z, r * z
    return PriceSet(lam=lam, p_low=v * low / (1.0 + low), p_high=v * high / (1.0 + high))


def _price_bounds(lambdas: np.ndarray, v: float, z: float) -> Tuple[np.ndarray, np.ndarray]:
    """노드 벡터에 대한 price_set"""
    r = lambdas / (1.0 - lambdas)
    low, high = r / z, r * z
    return v * low / (1.0 + low), v * high / (1.0 + high)


def _as_flex(params) -> FlexParams:
    """ModelParams / FlexParams / dict 를 FlexParams 로 변환"""
    if isinstance(params, FlexParams):
        return params
    if isinstance(params, ModelParams):
        return FlexParams.from_model(params)
    try:
        return FlexParams(**params)
    except ValidationError as e:
        details = pydantic_error_details(e)
        raise InvalidParameterError(
            "; ".join(item["message"] for item in details), details={"errors": details}
        )


def flex_grid(z: float, m: int, domain: Tuple[float, float]) -> Tuple[np.ndarray, float]:
    """절단 구간 중심에서 대칭인 정렬 격자 (간격 log z / m)"""
    lam_min, lam_max = domain
    if not 0.0 < lam_min < lam_max < 1.0:
        raise InvalidParameterError(
            f"가격 격자 구간은 0 < lambda_min < lambda_max < 1 이어야 합니다: {domain}"
        )
    if m < 1:
        raise InvalidParameterError(f"m 은 m >= 1 이어야 합니다: {m}")
    ell_min = math.log(lam_min) - math.log1p(-lam_min)
    ell_max = math.log(lam_max) - math.log1p(-lam_max)
    h = math.log(z) / m
    center = 0.5 * (ell_min + ell_max)
    J = int(math.floor(0.5 * (ell_max - ell_min) / h + 1e-9))
    nodes = center + h * np.arange(-J, J + 1, dtype=float)
    if not np.all(np.isfinite(np.exp(np.abs(nodes) + math.log(z)))):
        raise DomainError("갱신 후 로그승산이 표현 가능한 범위를 넘습니다")
    return nodes, h


def solve_flexible(
    params,
    domain: Tuple[float, float] = DEFAULT_DOMAIN,
    m: int = 50,
    tol: float = 1e-10,
    max_iter: Optional[int] = None,
    check_band: Optional[Tuple[float, float]] = None,
) -> FlexSolution:
    """
    가격을 매 기간 고르는 판매자의 가치 반복

    각 노드에서 풀링(가격 p_low, 신념 고정, 가치 p_low/(1-delta)) 과
    정보적 가격(p_high, theta 선택, ±log z 이동) 중 큰 쪽을 고른다.
    갱신이 절단 구간을 벗어나면 경계 노드의 풀링 가치를 연속 가치로 쓴다.

    Args:
        params: 가격 제외 파라미터 (ModelParams 이면 p 무시)
        domain: 절단 신념 구간
        m: 격자 세분화
        tol: 상한 노름 정지 임계값
        max_iter: 반복 상한
        check_band: 풀링 여부를 점검할 신념 구간 (기본은 전체)

    Returns:
        FlexSolution: 노드별 가치, 품질, 가격, 풀링 여부
    """
    fp = _as_flex(params)
    v, q, c, delta, z = fp.v, fp.q, fp.c, fp.delta, fp.z
    nodes, h = flex_grid(z, m, domain)
    n = nodes.shape[0]
    lambdas = 1.0 / (1.0 + np.exp(-nodes))
    p_low, p_high = _price_bounds(lambdas, v, z)
    pool_value = p_low / (1.0 - delta)

    idx = np.arange(n)
    up_idx, dn_idx = idx + m, idx - m
    up_out, dn_out = up_idx >= n, dn_idx < 0
    up_idx = np.minimum(up_idx, n - 1)
    dn_idx = np.maximum(dn_idx, 0)
    boundary_up, boundary_dn = pool_value[-1], pool_value[0]

    gamma0, gamma1 = 1.0 - q, q
    if max_iter is None:
        max_iter = 10 * max(1, math.ceil(math.log(tol) / math.log(delta)))

    V = pool_value.copy()
    sup_diff = math.inf
    iterations = 0
    while iterations < max_iter:
        V_up = np.where(up_out, boundary_up, V[up_idx])
        V_dn = np.where(dn_out, boundary_dn, V[dn_idx])
        info0 = p_high * gamma0 + delta * (gamma0 * V_up + (1.0 - gamma0) * V_dn)
        info1 = p_high * gamma1 - c + delta * (gamma1 * V_up + (1.0 - gamma1) * V_dn)
        V_new = np.maximum(pool_value, np.maximum(info0, info1))
        sup_diff = float(np.max(np.abs(V_new - V)))
        V = V_new
        iterations += 1
        if sup_diff <= tol:
            break

    if sup_diff > tol:
        logger.error(
            f"유연 가격 가치 반복 미수렴: iterations={iterations}, sup_diff={sup_diff:.3e}, tol={tol:.1e}"
        )
        raise ConvergenceError(
            "유연 가격 가치 반복이 max_iter 안에 수렴하지 않았습니다",
            details={"iterations": iterations, "sup_residual": sup_diff, "tol": tol},
        )

    V_up = np.where(up_out, boundary_up, V[up_idx])
    V_dn = np.where(dn_out, boundary_dn, V[dn_idx])
    info0 = p_high * gamma0 + delta * (gamma0 * V_up + (1.0 - gamma0) * V_dn)
    info1 = p_high * gamma1 - c + delta * (gamma1 * V_up + (1.0 - gamma1) * V_dn)
    informative = np.maximum(info0, info1)
    # 동점은 정보적 가격
    pooling = pool_value > informative
    theta = np.where(pooling, 0.0, (info1 > info0).astype(float))
    price = np.where(pooling, p_low, p_high)

    band_mask = np.ones(n, dtype=bool)
    if check_band is not None:
        band_mask = (lambdas >= check_band[0]) & (lambdas <= check_band[1])
    no_pooling = not bool(np.any(pooling[band_mask]))

    if not no_pooling:
        pooled = lambdas[pooling & band_mask]
        logger.warning(
            f"delta={delta} 에서 풀링 노드 {pooled.size}개 발생 "
            f"(lambda {pooled.min():.4f} ~ {pooled.max():.4f})"
        )
    logger.info(
        f"유연 가격 해: delta={delta}, 노드 수={n}, iterations={iterations}, 풀링 없음={no_pooling}"
    )

    for arr in (V, theta, price, pooling, p_low, p_high, nodes, lambdas):
        arr.setflags(write=False)
    return FlexSolution(
        params=fp,
        m=m,
        h=h,
        nodes=nodes,
        lambdas=lambdas,
        V=V,
        theta=theta,
        price=price,
        pooling=pooling,
        p_low=p_low,
        p_high=p_high,
        iterations=iterations,
        sup_residual=sup_diff,
        no_pooling=no_pooling,
        check_band=None if check_band is None else list(check_band),
    )


def bisect_threshold(
    predicate: Callable[[float], bool],
    lo: float,
    hi: float,
    tol: float,
    n_probes: int = 0,
) -> ThresholdSearch:
    """
    predicate 가 False -> True 로 바뀌는 지점을 이분 탐색

    n_probes > 0 이면 먼저 등간격 탐침으로 단조성을 점검하고,
    위반이 있으면 첫 True 지점 앞의 가장 넓은 일관 구간에서 탐색한다.
    """
    if not tol > 0:
        raise InvalidParameterError(f"tol 은 양수여야 합니다: {tol}")
    if not lo < hi:
        raise InvalidParameterError(f"lo < hi 이어야 합니다: {lo}, {hi}")

    evaluations: List[dict] = []

    def evaluate(x: float) -> bool:
        result = bool(predicate(x))
        evaluations.append({"x": x, "value": result})
        return result

    if not evaluate(hi):
        return ThresholdSearch(
            found=False, evaluations=evaluations, reason=f"상한 {hi} 에서도 조건 불만족"
        )
    if evaluate(lo):
        return ThresholdSearch(
            found=False, evaluations=evaluations, reason=f"하한 {lo} 에서 이미 조건 만족"
        )

    violations = 0
    if n_probes > 0:
        xs = np.linspace(lo, hi, n_probes + 2)[1:-1]
        values = [evaluate(float(x)) for x in xs]
        first_true = next((i for i, val in enumerate(values) if val), None)
        if first_true is not None:
            violations = sum(1 for val in values[first_true:] if not val)
            hi = float(xs[first_true])
            if first_true > 0:
                lo = float(xs[first_true - 1])
        else:
            lo = float(xs[-1])
        if violations:
            logger.warning(f"임계값 탐색 중 단조성 위반 {violations}건, 구간 [{lo}, {hi}] 사용")

    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if evaluate(mid):
            hi = mid
        else:
            lo = mid
        steps += 1

    return ThresholdSearch(
        found=True,
        threshold=0.5 * (lo + hi),
        bracket=[lo, hi],
        steps=steps,
        evaluations=evaluations,
        monotone_violations=violations,
    )


def delta_bar(
    params,
    domain: Tuple[float, float] = DEFAULT_DOMAIN,
    m: int = 50,
    tol_delta: float = 1e-3,
    check_band: Optional[Tuple[float, float]] = None,
    solve_tol: float = 1e-8,
    n_probes: int = 0,
) -> ThresholdSearch:
    """풀링이 사라지는 최소 할인율 추정 (조건: check_band 안 모든 노드 비풀링)"""
    if not tol_delta > 0:
        raise InvalidParameterError(f"tol_delta 는 양수여야 합니다: {tol_delta}")
    fp = _as_flex(params)

    def no_pooling_at(delta: float) -> bool:
        candidate = fp.model_copy(update={"delta": delta})
        return solve_flexible(candidate, domain, m, solve_tol, check_band=check_band).no_pooling

    result = bisect_threshold(no_pooling_at, tol_delta, 1.0 - tol_delta, tol_delta, n_probes)
    if result.found:
        logger.info(f"delta_bar 추정: {result.threshold:.6f} (구간 {result.bracket})")
    else:
        logger.warning(f"delta_bar 미발견: {result.reason}")
    return result


def flex_to_frame(solution: FlexSolution) -> pd.DataFrame:
    """노드당 한 행 (ell, lambda, V, theta, price, pooling, p_low, p_high)"""
    return pd.DataFrame(
        {
            "ell": solution.nodes,
            "lambda": solution.lambdas,
            "V": solution.V,
            "theta": solution.theta,
            "price": solution.price,
            "pooling": solution.pooling.astype(int),
            "p_low": solution.p_low,
            "p_high": solution.p_high,
        }
    )
