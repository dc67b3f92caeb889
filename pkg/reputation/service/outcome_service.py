"""
공개 결과 관측 확장 - 확대된 베이즈 스텝, 보간 가치 반복, 정밀도 비교정학, 이탈 시간
"""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd

from reputation.schema.dynamics_schema import HittingStats
from reputation.schema.extension_schema import OutcomeParams, OutcomeSolution
from reputation.schema.model_schema import Belief, ModelParams, Outcome, Region, Signal
from reputation.schema.solver_schema import Grid, SolveOptions
from reputation.service.dynamics_service import path_rng, summarize_exit_times
from reputation.service.model_service import (
    belief_from_log_odds,
    belief_from_probability,
    buyer_action,
    derive_statics,
    region_of,
)
from reputation.service.solver_service import (
    build_grid,
    cascade_values,
    policy_from_value,
    seller_tie_tolerance,
)
from reputation.utils.error_handler import (
    ConvergenceError,
    DomainError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

SNAP_TOL = 1e-9


def make_outcome(rho: float) -> OutcomeParams:
    """OutcomeParams 생성 (검증 실패 시 InvalidParameterError)"""
    if not 0.5 < rho <= 1.0:
        raise InvalidParameterError(f"rho 는 1/2 < rho <= 1 범위여야 합니다: {rho}")
    return OutcomeParams(rho=rho)


def outcome_update(
    belief: Belief, action: int, outcome: Outcome, z: float, w: float, statics=None
) -> Belief:
    """
    행동과 공개 결과에 따른 베이즈 갱신

    구매 후 G 는 r z w, B 는 r z / w, 불구매는 r / z.
    statics 가 주어지면 캐스케이드에서는 신념을 고정한다.
    """
    outcome = Outcome(outcome)
    if action not in (0, 1):
        raise DomainError(f"행동은 0 또는 1 이어야 합니다: {action}")
    if (action == 0) != (outcome == Outcome.NONE):
        raise DomainError(f"행동과 결과 조합이 맞지 않습니다: action={action}, outcome={outcome.value}")
    if belief.is_degenerate:
        return belief
    if statics is not None and region_of(belief, statics) != Region.EXPERIMENTATION:
        return belief

    log_z = math.log(z)
    if action == 0:
        return belief_from_log_odds(belief.ell - log_z)
    if math.isinf(w):
        return belief_from_probability(1.0 if outcome == Outcome.G else 0.0)
    log_w = math.log(w)
    step = log_w if outcome == Outcome.G else -log_w
    return belief_from_log_odds(belief.ell + log_z + step)


def _snap(x: np.ndarray) -> np.ndarray:
    """정수에 SNAP_TOL 이내로 가까운 격자 위치를 정수로 맞춤"""
    x = np.asarray(x, dtype=float)
    rounded = np.round(x)
    return np.where(np.abs(x - rounded) <= SNAP_TOL, rounded, x)


def outcome_targets(index, grid: Grid, w: float) -> Dict[str, np.ndarray]:
    """
    노드 인덱스에서 (구매, G), (구매, B), 불구매 후의 격자 위치 (분수 가능)

    w = inf 이면 G 는 +inf, B 는 -inf (상방/하방 캐스케이드로 흡수).
    """
    k = np.asarray(index, dtype=float)
    m = grid.m
    if math.isinf(w):
        good = np.full_like(k, math.inf)
        bad = np.full_like(k, -math.inf)
    else:
        offset = math.log(w) / grid.h
        good = _snap(k + m + offset)
        bad = _snap(k + m - offset)
    return {"good": good, "bad": bad, "pass": k - m}


def evaluate_at_positions(
    V: np.ndarray, positions: np.ndarray, cascades: Tuple[float, float]
) -> np.ndarray:
    """격자 위치에서 V 를 선형 보간 (경계 밖은 캐스케이드 상수)"""
    v_down, v_up = cascades
    n = V.shape[0]
    last = n - 1
    positions = np.asarray(positions, dtype=float)
    inside = np.clip(np.where(np.isfinite(positions), positions, 0.0), 0.0, last)
    lower = np.floor(inside).astype(int)
    upper = np.minimum(lower + 1, last)
    frac = inside - lower
    values = (1.0 - frac) * V[lower] + frac * V[upper]
    values = np.where(positions >= last, v_up, values)
    values = np.where(positions <= 0, v_down, values)
    return values


def outcome_marginal_incentive(
    v_good, v_bad, v_pass, params: ModelParams, rho: float
) -> np.ndarray:
    """
    정확한 기대값 전개에 따른 한계 유인

    (2q-1)p + delta[(q+rho-1) V_G + (q-rho) V_B - (2q-1) V_-] - c
    """
    q = params.q
    diff = (
        (q + rho - 1.0) * np.asarray(v_good)
        + (q - rho) * np.asarray(v_bad)
        - (2.0 * q - 1.0) * np.asarray(v_pass)
    )
    return (2.0 * q - 1.0) * params.p + params.delta * diff - params.c


def printed_outcome_incentive(
    v_good, v_bad, v_pass, params: ModelParams, rho: float
) -> np.ndarray:
    """불구매 항 부호가 + 인 대안 표기식 (비교용)"""
    q = params.q
    diff = (
        (q + rho - 1.0) * np.asarray(v_good)
        + (q - rho) * np.asarray(v_bad)
        + (2.0 * q - 1.0) * np.asarray(v_pass)
    )
    return (2.0 * q - 1.0) * params.p + params.delta * diff - params.c


def _continuations(
    V: np.ndarray, targets: Dict[str, np.ndarray], cascades: Tuple[float, float]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """내부 노드별 (V_G, V_B, V_-)"""
    return (
        evaluate_at_positions(V, targets["good"], cascades),
        evaluate_at_positions(V, targets["bad"], cascades),
        evaluate_at_positions(V, targets["pass"], cascades),
    )


def solve_outcomes(
    params: ModelParams,
    rho: float,
    opts: Optional[SolveOptions] = None,
) -> OutcomeSolution:
    """
    구매 후 결과가 공개되는 모형의 가치 반복

    연속 가치는 ell + log z ± log w 에서 선형 보간으로 평가하고,
    캐스케이드 임계값과 가치는 기준 모형과 같다.
    """
    outcome = make_outcome(rho)
    opts = opts or SolveOptions()
    statics = derive_statics(params)
    grid = build_grid(statics, opts.m)
    cascades = cascade_values(params, opts.epsilon)
    m = grid.m
    p, q, c, delta = params.p, params.q, params.c, params.delta
    w = outcome.w

    interior = np.arange(1, 2 * m)
    targets = outcome_targets(interior, grid, w)

    def candidates(V_full):
        V_G, V_B, V_P = _continuations(V_full, targets, cascades)
        cont1 = q * (rho * V_G + (1.0 - rho) * V_B) + (1.0 - q) * V_P
        cont0 = (1.0 - q) * ((1.0 - rho) * V_G + rho * V_B) + q * V_P
        cand1 = p * q - c + delta * cont1
        cand0 = p * (1.0 - q) + delta * cont0
        return cand0, cand1, (V_G, V_B, V_P)

    V = np.zeros(2 * m + 1)
    V[0], V[-1] = cascades
    max_iter = opts.resolved_max_iter(delta)
    sup_diff = math.inf
    iterations = 0
    while iterations < max_iter:
        cand0, cand1, _ = candidates(V)
        V_new = V.copy()
        V_new[1 : 2 * m] = np.maximum(cand0, cand1)
        sup_diff = float(np.max(np.abs(V_new - V)))
        V = V_new
        iterations += 1
        if sup_diff <= opts.tol:
            break

    if sup_diff > opts.tol:
        raise ConvergenceError(
            "결과 관측 모형 가치 반복이 수렴하지 않았습니다",
            details={"iterations": iterations, "sup_residual": sup_diff, "rho": rho},
        )

    _, _, (V_G, V_B, V_P) = candidates(V)
    Delta = np.full(2 * m + 1, -c)
    Delta[1 : 2 * m] = outcome_marginal_incentive(V_G, V_B, V_P, params, rho)
    Delta_printed = np.full(2 * m + 1, -c)
    Delta_printed[1 : 2 * m] = printed_outcome_incentive(V_G, V_B, V_P, params, rho)
    theta = policy_from_value(Delta, seller_tie_tolerance(params, cascades))
    discrepancy = float(np.max(np.abs(Delta - Delta_printed)))

    def pad(values, down, up):
        return np.concatenate(([down], values, [up]))

    logger.info(
        f"결과 관측 모형 수렴: rho={rho}, iterations={iterations}, 투자 노드 수={int(theta.sum())}"
    )
    logger.info(f"한계 유인 대안 표기식과의 차이 (상한 노름): {discrepancy:.6e}")

    return OutcomeSolution(
        params=params,
        outcome=outcome,
        options=opts,
        statics=statics,
        grid=grid,
        V=V,
        theta=theta,
        Delta=Delta,
        Delta_printed=Delta_printed,
        V_good=pad(V_G, cascades[0], cascades[1]),
        V_bad=pad(V_B, cascades[0], cascades[1]),
        V_pass=pad(V_P, cascades[0], cascades[1]),
        v_down=cascades[0],
        v_up=cascades[1],
        iterations=iterations,
        sup_residual=sup_diff,
        display_discrepancy=discrepancy,
    )


def rho_monotonicity_report(
    params: ModelParams,
    rho_values: Sequence[float],
    opts: Optional[SolveOptions] = None,
    tol_violation: float = 1e-12,
) -> Dict[str, Any]:
    """
    rho 증가에 따른 Delta_out 의 노드별 단조성 점검

    인접한 rho 쌍마다 두 해 모두에서 V(lambda^{+G}) >= V(lambda^{+B}) 인 노드만 검사한다.
    """
    rhos = sorted(rho_values)
    solutions = [solve_outcomes(params, rho, opts) for rho in rhos]
    pairs = []
    total_checked = total_excluded = total_violations = 0
    for a, b in zip(solutions, solutions[1:]):
        sl = a.grid.interior
        hypothesis = (a.V_good[sl] >= a.V_bad[sl]) & (b.V_good[sl] >= b.V_bad[sl])
        decrease = a.Delta[sl] - b.Delta[sl]
        violated = hypothesis & (decrease > tol_violation)
        checked = int(hypothesis.sum())
        excluded = int((~hypothesis).sum())
        violations = int(violated.sum())
        pairs.append(
            {
                "rho_from": a.outcome.rho,
                "rho_to": b.outcome.rho,
                "checked": checked,
                "excluded": excluded,
                "violations": violations,
                "max_decrease": float(decrease[hypothesis].max()) if checked else 0.0,
            }
        )
        total_checked += checked
        total_excluded += excluded
        total_violations += violations

    if total_violations:
        logger.warning(f"rho 단조성 위반 노드 {total_violations}개 (검사 {total_checked}개)")
    return {
        "rho_values": rhos,
        "pairs": pairs,
        "checked": total_checked,
        "excluded": total_excluded,
        "violations": total_violations,
    }


def simulate_outcome_path(
    solution: OutcomeSolution,
    lambda0: float,
    T_max: int,
    seed: int,
    path_id: int = 0,
) -> Dict[str, Any]:
    """
    결과 관측 모형의 신념 경로

    품질/신호 난수는 기준 모형과 같은 스트림을 쓰고, 결과 난수는 별도 스트림에서 뽑는다.
    신념은 격자 위치 단위로 추적하며 정책은 가장 가까운 내부 노드에서 읽는다.
    """
    if not 0.0 < lambda0 < 1.0:
        raise DomainError(f"초기 신념은 0 < lambda0 < 1 범위여야 합니다: {lambda0}")
    if T_max < 1:
        raise InvalidParameterError(f"T_max 는 1 이상이어야 합니다: {T_max}")

    params, statics, grid = solution.params, solution.statics, solution.grid
    m = grid.m
    rho, w = solution.outcome.rho, solution.outcome.w
    rng = path_rng(seed, path_id)
    outcome_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(path_id, 1))
    )

    belief0 = belief_from_probability(lambda0)
    region = region_of(belief0, statics)
    if region != Region.EXPERIMENTATION:
        side = "up" if region == Region.UP_CASCADE else "down"
        return {"absorbed_at": 0, "absorbed_to": side, "positions": [None]}

    x = float(min(max(grid.node_index(belief0.ell), 1), 2 * m - 1))
    positions: List[float] = [x]
    offset = math.inf if math.isinf(w) else math.log(w) / grid.h
    for t in range(T_max):
        u_quality, u_signal = rng.random(2)
        u_outcome = outcome_rng.random()
        k = int(min(max(round(x), 1), 2 * m - 1))
        quality = u_quality < solution.theta[k]
        prob_high_signal = params.q if quality else 1.0 - params.q
        signal = Signal.H if u_signal < prob_high_signal else Signal.L
        ell = grid.ell_low + x * grid.h
        action = buyer_action(math.exp(ell), signal, statics, params.tie_break)
        if action:
            prob_good = rho if quality else 1.0 - rho
            good = u_outcome < prob_good
            x = x + m + (offset if good else -offset)
        else:
            x = x - m
        if math.isfinite(x):
            x = float(_snap(np.array([x]))[0])
        positions.append(x)
        if x >= 2 * m:
            return {"absorbed_at": t + 1, "absorbed_to": "up", "positions": positions}
        if x <= 0:
            return {"absorbed_at": t + 1, "absorbed_to": "down", "positions": positions}
    return {"absorbed_at": None, "absorbed_to": "none", "positions": positions}


def outcome_hitting_stats(
    solution: OutcomeSolution,
    lambda0: float,
    n_paths: int,
    T_max: int,
    seed: int,
) -> HittingStats:
    """결과 관측 모형의 이탈 시간 Monte Carlo 통계"""
    if n_paths < 1:
        raise InvalidParameterError(f"n_paths 는 1 이상이어야 합니다: {n_paths}")
    taus, taus_up = [], []
    n_up = n_down = n_censored = 0
    for i in range(n_paths):
        result = simulate_outcome_path(solution, lambda0, T_max, seed, path_id=i)
        if result["absorbed_at"] is None:
            n_censored += 1
            continue
        taus.append(result["absorbed_at"])
        if result["absorbed_to"] == "up":
            n_up += 1
            taus_up.append(result["absorbed_at"])
        else:
            n_down += 1
    stats = summarize_exit_times(taus, taus_up, n_up, n_down, n_censored, T_max)
    logger.info(
        f"결과 관측 이탈 시간: rho={solution.outcome.rho}, mean_tau_up={stats.mean_tau_up}"
    )
    return stats


def outcome_to_frame(solution: OutcomeSolution) -> pd.DataFrame:
    """노드당 한 행 (해 스키마 + rho, 대안 한계 유인, 연속 가치)"""
    grid = solution.grid
    return pd.DataFrame(
        {
            "ell": grid.nodes,
            "lambda": grid.lambdas,
            "rho": solution.outcome.rho,
            "V": solution.V,
            "theta": solution.theta,
            "Delta": solution.Delta,
            "Delta_printed": solution.Delta_printed,
            "V_good": solution.V_good,
            "V_bad": solution.V_bad,
            "V_pass": solution.V_pass,
        }
    )
