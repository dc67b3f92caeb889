"""
무한 지평 동적계획 솔버 - 정렬 격자, 가치 반복, 정책 복원, 곡률 진단
"""

import math
from typing import Optional, Tuple
import logging

import numpy as np
import pandas as pd

from reputation.schema.model_schema import ModelParams, Statics
from reputation.schema.solver_schema import (
    ConcavityReport,
    Grid,
    Solution,
    SolveOptions,
)
from reputation.service.model_service import derive_statics
from reputation.utils.error_handler import ConvergenceError, InvalidParameterError

logger = logging.getLogger(__name__)

SELLER_TIE_RTOL = 1e-12


def build_grid(statics: Statics, m: int) -> Grid:
    """베이즈 스텝에 정렬된 격자 생성 (한 스텝 = 정확히 m 칸)"""
    if m < 1:
        raise InvalidParameterError(f"m 은 m >= 1 이어야 합니다: {m}")
    h = statics.log_z / m
    nodes = statics.ell_under + h * np.arange(2 * m + 1, dtype=float)
    # 끝점은 계산 오차 없이 임계값에 고정
    nodes[0] = statics.ell_under
    nodes[-1] = statics.ell_over
    nodes.setflags(write=False)
    return Grid(m=m, h=h, nodes=nodes)


def cascade_values(params: ModelParams, epsilon: float = 0.0) -> Tuple[float, float]:
    """
    캐스케이드 연속 가치 (v_down, v_up)

    캐스케이드에서는 신념이 고정되고 theta=0 이 최적이므로 등비급수로 닫힌 형태가 된다.
    """
    if not 0.0 <= epsilon < 0.5:
        raise InvalidParameterError(f"epsilon 은 0 <= epsilon < 1/2 범위여야 합니다: {epsilon}")
    scale = params.p / (1.0 - params.delta)
    return scale * epsilon, scale * (1.0 - epsilon)


def _continuations(
    V: np.ndarray, m: int, cascades: Tuple[float, float]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    내부 노드별 (V_up(k), V_dn(k))

    V 는 2m+1 노드 전체 벡터이며, 경계를 넘는 갱신은 캐스케이드 상수로 평가한다.
    """
    v_down, v_up = cascades
    k = np.arange(1, 2 * m)
    up_idx = k + m
    dn_idx = k - m
    V_up = np.where(up_idx >= 2 * m, v_up, V[np.minimum(up_idx, 2 * m)])
    V_dn = np.where(dn_idx <= 0, v_down, V[np.maximum(dn_idx, 0)])
    return V_up, V_dn


def _with_boundaries(V: np.ndarray, m: int, cascades: Tuple[float, float]) -> np.ndarray:
    """내부 또는 전체 벡터를 끝점에 캐스케이드 값을 둔 2m+1 벡터로 정규화"""
    V = np.asarray(V, dtype=float)
    if V.shape[0] == 2 * m - 1:
        V = np.concatenate(([cascades[0]], V, [cascades[1]]))
    elif V.shape[0] != 2 * m + 1:
        raise InvalidParameterError(
            f"가치 벡터 길이가 격자와 맞지 않습니다: {V.shape[0]} (m={m})"
        )
    else:
        V = V.copy()
        V[0], V[-1] = cascades
    return V


def _candidates(
    V_up: np.ndarray, V_dn: np.ndarray, params: ModelParams
) -> Tuple[np.ndarray, np.ndarray]:
    """theta=0, theta=1 후보 가치"""
    p, q, c, delta = params.p, params.q, params.c, params.delta
    gamma0, gamma1 = 1.0 - q, q
    cand0 = p * gamma0 + delta * (gamma0 * V_up + (1.0 - gamma0) * V_dn)
    cand1 = p * gamma1 - c + delta * (gamma1 * V_up + (1.0 - gamma1) * V_dn)
    return cand0, cand1


def bellman_step(
    V: np.ndarray,
    grid: Grid,
    params: ModelParams,
    cascades: Tuple[float, float],
) -> Tuple[np.ndarray, float]:
    """
    벨만 연산자 1회 적용

    Args:
        V: 노드 가치 (내부 2m-1 개 또는 전체 2m+1 개)
        grid: 정렬 격자
        params: 모델 파라미터
        cascades: (v_down, v_up)

    Returns:
        Tuple[np.ndarray, float]: (새 가치 전체 벡터, 내부 상한 노름 변화량)
    """
    m = grid.m
    V_full = _with_boundaries(V, m, cascades)
    V_up, V_dn = _continuations(V_full, m, cascades)
    cand0, cand1 = _candidates(V_up, V_dn, params)

    V_new = V_full.copy()
    V_new[1 : 2 * m] = np.maximum(cand0, cand1)
    sup_diff = float(np.max(np.abs(V_new[1 : 2 * m] - V_full[1 : 2 * m])))
    return V_new, sup_diff


def marginal_incentive(
    V: np.ndarray,
    grid: Grid,
    params: ModelParams,
    cascades: Tuple[float, float],
) -> np.ndarray:
    """한계 유인 Delta = (2q-1)[p + delta (V_up - V_dn)] - c, 캐스케이드 노드는 -c"""
    m = grid.m
    V_full = _with_boundaries(V, m, cascades)
    V_up, V_dn = _continuations(V_full, m, cascades)
    Delta = np.full(2 * m + 1, -params.c)
    Delta[1 : 2 * m] = (2.0 * params.q - 1.0) * (
        params.p + params.delta * (V_up - V_dn)
    ) - params.c
    return Delta


def seller_tie_tolerance(params: ModelParams, cascades: Tuple[float, float]) -> float:
    """Delta 를 0 으로 볼 절대 허용오차 (유인 항의 크기에 비례)"""
    scale = max(
        1.0,
        params.c,
        params.p + params.delta * max(abs(cascades[0]), abs(cascades[1])),
    )
    return SELLER_TIE_RTOL * scale


def policy_from_value(Delta: np.ndarray, atol: float = 0.0) -> np.ndarray:
    """theta = 1{Delta > atol} (|Delta| <= atol 이면 판매자 동점 처리로 0)"""
    return (np.asarray(Delta) > atol).astype(float)


def finite_difference_gradient(
    V: np.ndarray, grid: Grid, cascades: Tuple[float, float]
) -> np.ndarray:
    """유한차분 기울기 D_k = V_up(k) - V_dn(k), 캐스케이드 노드는 0"""
    m = grid.m
    V_full = _with_boundaries(V, m, cascades)
    V_up, V_dn = _continuations(V_full, m, cascades)
    D = np.zeros(2 * m + 1)
    D[1 : 2 * m] = V_up - V_dn
    return D


def evaluate_policy(
    params: ModelParams,
    grid: Grid,
    theta: np.ndarray,
    cascades: Tuple[float, float],
) -> np.ndarray:
    """고정 정책의 가치를 선형 방정식으로 정확히 평가 (전체 2m+1 벡터 반환)"""
    m = grid.m
    n = 2 * m - 1
    theta_int = np.asarray(theta, dtype=float)
    if theta_int.shape[0] == 2 * m + 1:
        theta_int = theta_int[1 : 2 * m]
    q, p, c, delta = params.q, params.p, params.c, params.delta
    v_down, v_up = cascades

    gamma = (1.0 - q) + theta_int * (2.0 * q - 1.0)
    A = np.eye(n)
    b = p * gamma - c * theta_int
    for i in range(n):
        k = i + 1
        up, dn = k + m, k - m
        if up >= 2 * m:
            b[i] += delta * gamma[i] * v_up
        else:
            A[i, up - 1] -= delta * gamma[i]
        if dn <= 0:
            b[i] += delta * (1.0 - gamma[i]) * v_down
        else:
            A[i, dn - 1] -= delta * (1.0 - gamma[i])
    V_int = np.linalg.solve(A, b)
    return np.concatenate(([v_down], V_int, [v_up]))


def solve(
    params: ModelParams,
    opts: Optional[SolveOptions] = None,
    V0: Optional[np.ndarray] = None,
) -> Solution:
    """가치 반복으로 무한 지평 고정점 계산"""
    opts = opts or SolveOptions()
    statics = derive_statics(params)
    grid = build_grid(statics, opts.m)
    cascades = cascade_values(params, opts.epsilon)
    max_iter = opts.resolved_max_iter(params.delta)

    V = _with_boundaries(
        np.zeros(2 * opts.m - 1) if V0 is None else V0, opts.m, cascades
    )
    sup_diff = math.inf
    iterations = 0
    while iterations < max_iter:
        V, sup_diff = bellman_step(V, grid, params, cascades)
        iterations += 1
        if sup_diff <= opts.tol:
            break

    if sup_diff > opts.tol:
        logger.error(
            f"가치 반복 미수렴: iterations={iterations}, sup_diff={sup_diff:.3e}, tol={opts.tol:.1e}"
        )
        raise ConvergenceError(
            "가치 반복이 max_iter 안에 수렴하지 않았습니다",
            details={"iterations": iterations, "sup_residual": sup_diff, "tol": opts.tol},
        )

    Delta = marginal_incentive(V, grid, params, cascades)
    theta = policy_from_value(Delta, seller_tie_tolerance(params, cascades))
    D = finite_difference_gradient(V, grid, cascades)
    for arr in (V, Delta, theta, D):
        arr.setflags(write=False)

    logger.info(
        f"가치 반복 수렴: m={opts.m}, epsilon={opts.epsilon}, iterations={iterations}, "
        f"sup_residual={sup_diff:.3e}, 투자 노드 수={int(theta.sum())}"
    )
    return Solution(
        params=params,
        options=opts,
        statics=statics,
        grid=grid,
        V=V,
        theta=theta,
        Delta=Delta,
        D=D,
        v_down=cascades[0],
        v_up=cascades[1],
        iterations=iterations,
        sup_residual=sup_diff,
    )


def concavity_report(
    V: np.ndarray, grid: Optional[Grid] = None, tol_violation: float = 1e-9
) -> ConcavityReport:
    """
    가치 함수의 단조성과 로그승산 오목성 진단

    2차 차분 V_{k+1} - 2V_k + V_{k-1} <= tol, 1차 차분 >= -tol 을 검사하고 최악 위반을 보고한다.
    """
    V = np.asarray(V, dtype=float)
    if grid is not None and V.shape[0] != grid.n_nodes:
        raise InvalidParameterError("가치 벡터 길이가 격자와 맞지 않습니다")

    first = np.diff(V)
    second = V[2:] - 2.0 * V[1:-1] + V[:-2] if V.shape[0] >= 3 else np.zeros(0)
    monotone_violation = float(max(0.0, -first.min())) if first.size else 0.0
    concavity_violation = float(max(0.0, second.max())) if second.size else 0.0

    return ConcavityReport(
        is_monotone=monotone_violation <= tol_violation,
        is_concave_in_log_odds=concavity_violation <= tol_violation,
        max_violation=max(monotone_violation, concavity_violation),
        max_monotone_violation=monotone_violation,
        max_concavity_violation=concavity_violation,
    )


def solution_to_frame(solution: Solution) -> pd.DataFrame:
    """노드당 한 행 (ell, lambda, V, theta, Delta, D)"""
    grid = solution.grid
    return pd.DataFrame(
        {
            "ell": grid.nodes,
            "lambda": grid.lambdas,
            "V": solution.V,
            "theta": solution.theta,
            "Delta": solution.Delta,
            "D": solution.D,
        }
    )


def solution_to_record(solution: Solution) -> dict:
    """JSON 직렬화용 딕셔너리 (노드, 신념, 가치, 정책, 메타데이터)"""
    report = concavity_report(solution.V, solution.grid)
    return {
        "metadata": solution.metadata(),
        "nodes": solution.grid.nodes,
        "lambda": solution.grid.lambdas,
        "V": solution.V,
        "theta": solution.theta,
        "Delta": solution.Delta,
        "D": solution.D,
        "concavity": report.model_dump(),
    }
