"""
유한 지평 후방귀납 솔버 - 무한 지평 고정점으로의 수렴 진단과 경계 혼합 병리 예시
"""

from typing import Dict, Any, List, Optional, Sequence
import logging

import numpy as np
import pandas as pd

from reputation.schema.model_schema import ModelParams, Region, Signal
from reputation.schema.solver_schema import FiniteSolution, SolveOptions
from reputation.service.model_service import (
    belief_from_probability,
    buyer_action,
    derive_statics,
    region_of,
)
from reputation.service.solver_service import (
    bellman_step,
    build_grid,
    marginal_incentive,
    policy_from_value,
    seller_tie_tolerance,
    solve,
)
from reputation.utils.error_handler import InvalidParameterError

logger = logging.getLogger(__name__)


def solve_finite(
    params: ModelParams, T: int, opts: Optional[SolveOptions] = None
) -> FiniteSolution:
    """
    T 기간 게임을 t=T 부터 후방귀납으로 계산

    무한 지평과 같은 1단계 연산자를 쓰되 연속 가치는 V_{t+1}, 캐스케이드 가치도 기간별로 누적한다.
    """
    if T < 1:
        raise InvalidParameterError(f"지평 T 는 1 이상이어야 합니다: {T}")
    opts = opts or SolveOptions()
    statics = derive_statics(params)
    grid = build_grid(statics, opts.m)
    m, eps = opts.m, opts.epsilon
    n = 2 * m + 1

    V = np.zeros((T, n))
    theta = np.zeros((T, n))
    Delta = np.zeros((T, n))
    v_down = np.zeros(T)
    v_up = np.zeros(T)

    # 종단 V_{T+1} = 0
    next_V = np.zeros(n)
    next_down, next_up = 0.0, 0.0
    for t in range(T, 0, -1):
        cascades_next = (next_down, next_up)
        row, _ = bellman_step(next_V, grid, params, cascades_next)
        Delta[t - 1] = marginal_incentive(next_V, grid, params, cascades_next)
        theta[t - 1] = policy_from_value(
            Delta[t - 1], seller_tie_tolerance(params, cascades_next)
        )

        # 캐스케이드에서는 신념이 고정되고 theta=0
        v_down[t - 1] = params.p * eps + params.delta * next_down
        v_up[t - 1] = params.p * (1.0 - eps) + params.delta * next_up
        row[0], row[-1] = v_down[t - 1], v_up[t - 1]
        V[t - 1] = row

        next_V, next_down, next_up = row, v_down[t - 1], v_up[t - 1]

    for arr in (V, theta, Delta, v_down, v_up):
        arr.setflags(write=False)

    logger.info(f"유한 지평 해 계산 완료: T={T}, m={m}, tie_break={params.tie_break}")
    return FiniteSolution(
        params=params,
        options=opts,
        grid=grid,
        T=T,
        V=V,
        theta=theta,
        Delta=Delta,
        v_down=v_down,
        v_up=v_up,
        tie_break=params.tie_break,
    )


def convergence_to_infinite(
    params: ModelParams,
    T_list: Sequence[int],
    opts: Optional[SolveOptions] = None,
) -> Dict[str, Any]:
    """
    지평 T 별 V_1^(T) 과 무한 지평 고정점의 상한 노름 격차 보고

    Returns:
        Dict: T 목록, 격차, 꼬리 상한, 단조성 판정
    """
    T_list = list(T_list)
    if not T_list:
        raise InvalidParameterError("T_list 가 비어 있습니다")
    if any(T < 1 for T in T_list) or any(b <= a for a, b in zip(T_list, T_list[1:])):
        raise InvalidParameterError(f"T_list 는 1 이상의 증가 수열이어야 합니다: {T_list}")

    opts = opts or SolveOptions()
    infinite = solve(params, opts)
    tail_scale = params.p / (1.0 - params.delta)

    rows: List[Dict[str, Any]] = []
    previous: Optional[np.ndarray] = None
    pointwise_monotone = True
    for T in T_list:
        V1 = solve_finite(params, T, opts).V_at(1)
        gap = float(np.max(np.abs(V1 - infinite.V)))
        if previous is not None and np.any(V1 < previous - 1e-12):
            pointwise_monotone = False
        previous = V1
        rows.append(
            {"T": T, "gap": gap, "tail_bound": params.delta**T * tail_scale}
        )

    gaps = [row["gap"] for row in rows]
    gaps_monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    if not (gaps_monotone and pointwise_monotone):
        logger.warning(
            f"유한 지평 수렴 단조성 위반: gaps_monotone={gaps_monotone}, pointwise={pointwise_monotone}"
        )
    return {
        "rows": rows,
        "gaps_monotone": gaps_monotone,
        "pointwise_monotone": pointwise_monotone,
        "infinite_tol": opts.tol,
    }


def boundary_pathology_demo(params: ModelParams) -> Dict[str, Any]:
    """
    2기간 구성에서 lambda_2 = 상방 임계값일 때 두 동점 처리 규칙이 만드는 구매자 2 의 행동 비교

    같은 공개 신념에서 L 신호 후 행동이 규칙에 따라 달라지는지를 구조화된 레코드로 반환한다.
    """
    statics = derive_statics(params)
    lambda_2 = statics.lambda_over
    belief = belief_from_probability(lambda_2)
    # 임계값에서는 사후 승산이 정확히 K 가 되도록 닫힌 형태의 승산 사용
    r_2 = statics.r_over

    actions = {}
    for rule in ("buy", "pass"):
        actions[rule] = {
            "after_H": buyer_action(r_2, Signal.H, statics, tie_break=rule),
            "after_L": buyer_action(r_2, Signal.L, statics, tie_break=rule),
        }

    differs = actions["buy"]["after_L"] != actions["pass"]["after_L"]
    region = region_of(belief, statics)
    logger.info(
        f"경계 병리 예시: lambda_2={lambda_2:.6f}, region={region.value}, "
        f"buy 규칙 L 후 행동={actions['buy']['after_L']}, pass 규칙 L 후 행동={actions['pass']['after_L']}"
    )
    return {
        "T": 2,
        "lambda_2": lambda_2,
        "odds_2": r_2,
        "region_2": region,
        "posterior_odds_after_L": r_2 / statics.z,
        "K": statics.K,
        "actions": actions,
        "action_differs_across_tie_breaks": differs,
        "note": "같은 공개 신념에서 구매자 행동이 동점 처리 규칙에 따라 달라진다 (선택 규칙이 고정하는 지점)",
    }


def finite_to_frame(solution: FiniteSolution) -> pd.DataFrame:
    """기간 차원을 추가한 노드별 표 (period, ell, lambda, V, theta, Delta)"""
    grid = solution.grid
    frames = []
    for t in range(1, solution.T + 1):
        frames.append(
            pd.DataFrame(
                {
                    "period": t,
                    "ell": grid.nodes,
                    "lambda": grid.lambdas,
                    "V": solution.V[t - 1],
                    "theta": solution.theta[t - 1],
                    "Delta": solution.Delta[t - 1],
                }
            )
        )
    return pd.concat(frames, ignore_index=True)
