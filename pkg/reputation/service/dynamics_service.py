"""
신념 동학 - 표류, Monte Carlo 경로 시뮬레이션, 이탈 시간, 투자 패턴 분류, 후생 추정
"""

import math
from typing import Any, Dict, List, Optional, Sequence, Union
import logging

import numpy as np
import pandas as pd

from reputation.schema.dynamics_schema import (
    HittingStats,
    IndexInterval,
    Path,
    Pattern,
    PatternReport,
    WelfareReport,
)
from reputation.schema.model_schema import Region, Signal
from reputation.schema.solver_schema import Grid, Solution
from reputation.service.model_service import (
    belief_from_log_odds,
    belief_from_probability,
    buyer_action,
    region_of,
)
from reputation.utils.error_handler import DomainError, InvalidParameterError

logger = logging.getLogger(__name__)


def drift(theta: float, q: float, z: float) -> float:
    """한 기간 기대 로그승산 변화 mu = (2q-1)(2theta-1) log z"""
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta 는 [0, 1] 범위여야 합니다: {theta}")
    return (2.0 * q - 1.0) * (2.0 * theta - 1.0) * math.log(z)


def path_rng(seed: int, path_id: int) -> np.random.Generator:
    """(seed, path_id) 로 결정되는 독립 난수 스트림"""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(path_id,)))


def _resolve_theta(
    solution: Solution, theta_override: Optional[Union[float, np.ndarray]]
) -> np.ndarray:
    """노드별 정책 벡터 (합성 정책은 내부 노드에만 적용)"""
    n = solution.grid.n_nodes
    if theta_override is None:
        return np.asarray(solution.theta, dtype=float)
    theta = np.asarray(theta_override, dtype=float)
    if theta.ndim == 0:
        theta = np.full(n, float(theta))
        theta[0] = theta[-1] = 0.0
    if theta.shape[0] != n:
        raise InvalidParameterError(
            f"정책 벡터 길이가 격자와 맞지 않습니다: {theta.shape[0]} != {n}"
        )
    if np.any(theta < 0.0) or np.any(theta > 1.0):
        raise InvalidParameterError("정책 값은 [0, 1] 범위여야 합니다")
    return theta


def simulate_path(
    solution: Solution,
    lambda0: float,
    T_max: int,
    seed: int,
    path_id: int = 0,
    stop_at_absorption: bool = True,
    theta_override: Optional[Union[float, np.ndarray]] = None,
) -> Path:
    """
    해의 정책 아래에서 신념 경로 한 개를 시뮬레이션

    매 기간 균등난수 두 개(품질, 신호)를 뽑아 캐스케이드 이후에도 스트림이 어긋나지 않게 한다.
    격자 밖 초기 신념은 가장 가까운 내부 노드로 한 번 맞춘다.

    Args:
        solution: 무한 지평 해
        lambda0: 초기 신념 (0 < lambda0 < 1)
        T_max: 최대 기간 수
        seed: RNG 시드
        path_id: 경로 번호
        stop_at_absorption: True 이면 캐스케이드 진입 시 중단
        theta_override: 합성 정책 (스칼라 또는 노드 벡터)

    Returns:
        Path: 기간 시작 신념과 기간별 품질/행동
    """
    if not 0.0 < lambda0 < 1.0:
        raise DomainError(f"초기 신념은 0 < lambda0 < 1 범위여야 합니다: {lambda0}")
    if T_max < 1:
        raise InvalidParameterError(f"T_max 는 1 이상이어야 합니다: {T_max}")

    params, statics, grid = solution.params, solution.statics, solution.grid
    m = grid.m
    theta_vec = _resolve_theta(solution, theta_override)
    rng = path_rng(seed, path_id)

    belief0 = belief_from_probability(lambda0)
    region = region_of(belief0, statics)
    if region == Region.EXPERIMENTATION:
        k = min(max(grid.node_index(belief0.ell), 1), 2 * m - 1)
        ell = float(grid.nodes[k])
        absorbed_at: Optional[int] = None
        absorbed_to = "none"
    else:
        k = None
        ell = belief0.ell
        absorbed_at = 0
        absorbed_to = "up" if region == Region.UP_CASCADE else "down"

    ells = [ell]
    qualities: List[int] = []
    actions: List[int] = []

    for t in range(T_max):
        if absorbed_at is not None and stop_at_absorption:
            break
        u_quality, u_signal = rng.random(2)

        if absorbed_at is not None:
            quality = 0
            action = 1 if absorbed_to == "up" else 0
        else:
            quality = int(u_quality < theta_vec[k])
            prob_high_signal = params.q if quality else 1.0 - params.q
            signal = Signal.H if u_signal < prob_high_signal else Signal.L
            action = buyer_action(math.exp(ell), signal, statics, params.tie_break)
            k = k + m if action else k - m
            ell = grid.ell_low + k * grid.h
            if k >= 2 * m:
                absorbed_at, absorbed_to = t + 1, "up"
            elif k <= 0:
                absorbed_at, absorbed_to = t + 1, "down"

        qualities.append(quality)
        actions.append(action)
        ells.append(ell)

    ell_series = np.asarray(ells, dtype=float)
    lambda_series = np.array([belief_from_log_odds(x).lam for x in ells])
    return Path(
        seed=seed,
        path_id=path_id,
        lambda_series=lambda_series,
        ell_series=ell_series,
        theta_series=np.asarray(qualities, dtype=int),
        action_series=np.asarray(actions, dtype=int),
        absorbed_at=absorbed_at,
        absorbed_to=absorbed_to,
    )


def hitting_stats(
    solution: Solution,
    lambda0: float,
    n_paths: int,
    T_max: int,
    seed: int,
    theta_override: Optional[Union[float, np.ndarray]] = None,
    path_offset: int = 0,
) -> HittingStats:
    """실험 영역 이탈 시간의 Monte Carlo 통계 (검열 비율을 따로 보고)"""
    if n_paths < 1:
        raise InvalidParameterError(f"n_paths 는 1 이상이어야 합니다: {n_paths}")

    taus: List[int] = []
    taus_up: List[int] = []
    n_up = n_down = n_censored = 0
    for i in range(n_paths):
        path = simulate_path(
            solution,
            lambda0,
            T_max,
            seed,
            path_id=path_offset + i,
            theta_override=theta_override,
        )
        if path.absorbed_at is None:
            n_censored += 1
            continue
        taus.append(path.absorbed_at)
        if path.absorbed_to == "up":
            n_up += 1
            taus_up.append(path.absorbed_at)
        else:
            n_down += 1

    stats = summarize_exit_times(taus, taus_up, n_up, n_down, n_censored, T_max)
    logger.info(
        f"이탈 시간 통계: lambda0={lambda0}, n_paths={n_paths}, mean_tau={stats.mean_tau}, "
        f"up={stats.fraction_up:.4f}, censored={stats.fraction_censored:.4f}"
    )
    if n_censored:
        logger.warning(f"T_max={T_max} 까지 흡수되지 않은 경로 {n_censored}개")
    return stats


def summarize_exit_times(
    taus: Sequence[int],
    taus_up: Sequence[int],
    n_up: int,
    n_down: int,
    n_censored: int,
    T_max: int,
) -> HittingStats:
    """이탈 시간 목록을 HittingStats 로 요약"""
    n_paths = n_up + n_down + n_censored
    arr = np.asarray(taus, dtype=float)
    mean_tau = se_tau = median_tau = None
    if arr.size:
        mean_tau = float(arr.mean())
        median_tau = float(np.median(arr))
        se_tau = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return HittingStats(
        n_paths=n_paths,
        T_max=T_max,
        mean_tau=mean_tau,
        se_tau=se_tau,
        median_tau=median_tau,
        mean_tau_up=float(np.mean(taus_up)) if len(taus_up) else None,
        fraction_up=n_up / n_paths,
        fraction_down=n_down / n_paths,
        fraction_censored=n_censored / n_paths,
    )


def exact_absorption(theta: np.ndarray, grid: Grid, q: float) -> Dict[str, np.ndarray]:
    """
    정렬 격자 위 흡수 마르코프 연쇄의 정확한 흡수 확률과 기대 이탈 시간

    Args:
        theta: 노드별 정책 (전체 2m+1 또는 내부 2m-1)
        grid: 정렬 격자
        q: 신호 정밀도

    Returns:
        Dict: prob_up, prob_down, expected_tau (전체 2m+1 노드, 끝점은 자명한 값)
    """
    m = grid.m
    n = 2 * m - 1
    theta = np.asarray(theta, dtype=float)
    if theta.shape[0] == 2 * m + 1:
        theta = theta[1 : 2 * m]
    if theta.shape[0] != n:
        raise InvalidParameterError("정책 벡터 길이가 격자와 맞지 않습니다")

    gamma = (1.0 - q) + theta * (2.0 * q - 1.0)
    Q = np.zeros((n, n))
    R = np.zeros((n, 2))  # 열 0: 하방, 열 1: 상방
    for i in range(n):
        k = i + 1
        if k + m >= 2 * m:
            R[i, 1] += gamma[i]
        else:
            Q[i, k + m - 1] += gamma[i]
        if k - m <= 0:
            R[i, 0] += 1.0 - gamma[i]
        else:
            Q[i, k - m - 1] += 1.0 - gamma[i]

    A = np.eye(n) - Q
    B = np.linalg.solve(A, R)
    tau = np.linalg.solve(A, np.ones(n))

    prob_up = np.concatenate(([0.0], B[:, 1], [1.0]))
    prob_down = np.concatenate(([1.0], B[:, 0], [0.0]))
    expected_tau = np.concatenate(([0.0], tau, [0.0]))
    return {"prob_up": prob_up, "prob_down": prob_down, "expected_tau": expected_tau}


def _runs(mask: np.ndarray) -> List[tuple]:
    """불리언 배열의 True 구간 (시작, 끝) 목록"""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def classify_incentive(
    Delta: np.ndarray,
    theta: Optional[np.ndarray] = None,
    lambdas: Optional[np.ndarray] = None,
    offset: int = 1,
) -> PatternReport:
    """
    내부 노드 Delta 배열의 {Delta > 0} 연결 성분으로 패턴 분류

    Args:
        Delta: 내부 노드 한계 유인
        theta: 내부 노드 정책 (없으면 1{Delta > 0})
        lambdas: 내부 노드 신념 (선택)
        offset: 보고용 노드 번호 오프셋 (내부 첫 노드 = 1)
    """
    Delta = np.asarray(Delta, dtype=float)
    theta = (Delta > 0).astype(float) if theta is None else np.asarray(theta, dtype=float)

    def interval(a: int, b: int) -> IndexInterval:
        return IndexInterval(
            start=a + offset,
            end=b + offset,
            lambda_start=None if lambdas is None else float(lambdas[a]),
            lambda_end=None if lambdas is None else float(lambdas[b]),
        )

    runs = _runs(Delta > 0)
    components = [interval(a, b) for a, b in runs]
    gaps = [interval(runs[i][1] + 1, runs[i + 1][0] - 1) for i in range(len(runs) - 1)]
    directions = ["up" if theta[a : b + 1].mean() >= 0.5 else "down" for a, b in runs]

    if not runs:
        classification = Pattern.NO_INVESTMENT
    elif len(runs) == 1:
        classification = Pattern.EARLY_RESOLUTION
    elif len(runs) == 2:
        classification = Pattern.DOUBLE_HUMP
    else:
        classification = Pattern.OTHER

    return PatternReport(
        components=components,
        classification=classification,
        gap_intervals=gaps,
        drift_directions=directions,
    )


def classify(solution: Solution) -> PatternReport:
    """해의 투자 집합을 ER / DH / 무투자 / 기타로 분류"""
    interior = solution.grid.interior
    report = classify_incentive(
        solution.Delta[interior],
        solution.theta[interior],
        solution.grid.lambdas[interior],
    )
    logger.info(
        f"투자 패턴 분류: {report.classification.value}, "
        f"성분 크기={[component.size for component in report.components]}"
    )
    return report


def _discounted_sum(delta: float, start: int, stop: int) -> float:
    """sum_{t=start}^{stop-1} delta^t"""
    if stop <= start:
        return 0.0
    return delta**start * (1.0 - delta ** (stop - start)) / (1.0 - delta)


def path_surplus(path: Path, solution: Solution, horizon: int) -> Dict[str, float]:
    """
    경로 하나의 할인 잉여 (구매자, 판매자, 총)

    흡수 이후 구간은 흐름이 상수이므로 등비급수로 더한다.
    """
    params = solution.params
    v, p, c, delta = params.v, params.p, params.c, params.delta
    quality = path.theta_series.astype(float)
    action = path.action_series.astype(float)
    n = min(path.n_periods, horizon)
    discount = delta ** np.arange(n)

    buyer = float(np.sum(discount * action[:n] * (v * quality[:n] - p)))
    seller = float(np.sum(discount * (p * action[:n] - c * quality[:n])))

    if path.absorbed_to == "up" and n < horizon:
        tail = _discounted_sum(delta, n, horizon)
        buyer += -p * tail
        seller += p * tail
    return {"buyer": buyer, "seller": seller, "total": buyer + seller}


def welfare_mc(
    solution: Solution,
    lambda0: float,
    n_paths: int,
    horizon: int,
    seed: int,
) -> WelfareReport:
    """할인 잉여의 Monte Carlo 평균과 표준오차"""
    if horizon < 1:
        raise InvalidParameterError(f"horizon 은 1 이상이어야 합니다: {horizon}")
    if n_paths < 1:
        raise InvalidParameterError(f"n_paths 는 1 이상이어야 합니다: {n_paths}")

    rows = []
    for i in range(n_paths):
        path = simulate_path(solution, lambda0, horizon, seed, path_id=i)
        rows.append(path_surplus(path, solution, horizon))
    frame = pd.DataFrame(rows)

    def mean_se(column: str):
        values = frame[column].to_numpy()
        se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
        return float(values.mean()), se

    buyer_mean, buyer_se = mean_se("buyer")
    seller_mean, seller_se = mean_se("seller")
    total_mean, total_se = mean_se("total")
    logger.info(
        f"후생 추정: lambda0={lambda0}, n_paths={n_paths}, horizon={horizon}, "
        f"total={total_mean:.6f}±{total_se:.6f}"
    )
    return WelfareReport(
        n_paths=n_paths,
        horizon=horizon,
        buyer_mean=buyer_mean,
        buyer_se=buyer_se,
        seller_mean=seller_mean,
        seller_se=seller_se,
        total_mean=total_mean,
        total_se=total_se,
    )


def paths_to_frame(paths: Sequence[Path]) -> pd.DataFrame:
    """경로 목록을 (path_id, t, lambda, ell, theta, action) 행으로 변환"""
    frames = []
    for path in paths:
        n = path.n_periods
        theta = np.full(n + 1, np.nan)
        action = np.full(n + 1, np.nan)
        theta[:n] = path.theta_series
        action[:n] = path.action_series
        frames.append(
            pd.DataFrame(
                {
                    "path_id": path.path_id,
                    "t": np.arange(n + 1),
                    "lambda": path.lambda_series,
                    "ell": path.ell_series,
                    "theta": theta,
                    "action": action,
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=["path_id", "t", "lambda", "ell", "theta", "action"])
    return pd.concat(frames, ignore_index=True)


def hitting_to_record(stats: HittingStats, extra: Optional[Dict[str, Any]] = None) -> dict:
    """JSON 직렬화용 통계 레코드"""
    record = stats.model_dump()
    if extra:
        record.update(extra)
    return record
