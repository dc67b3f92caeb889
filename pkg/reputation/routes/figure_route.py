"""
그림 데이터 - 정책/표류 곡선, 가치/유한차분 곡선, 표본 신념 경로
"""

from typing import List
import logging

import numpy as np
import pandas as pd

from reputation.schema.dynamics_schema import Path
from reputation.schema.solver_schema import Solution
from reputation.service.dynamics_service import drift, paths_to_frame, simulate_path

logger = logging.getLogger(__name__)


def policy_drift_frame(solution: Solution) -> pd.DataFrame:
    """노드별 정책과 표류 (캐스케이드 노드 포함)"""
    params, statics, grid = solution.params, solution.statics, solution.grid
    mu = np.array([drift(float(theta), params.q, statics.z) for theta in solution.theta])
    # 캐스케이드에서는 신념이 움직이지 않는다
    mu[0] = mu[-1] = 0.0
    return pd.DataFrame(
        {
            "ell": grid.nodes,
            "lambda": grid.lambdas,
            "theta": solution.theta,
            "Delta": solution.Delta,
            "drift": mu,
        }
    )


def value_fdiff_frame(solution: Solution) -> pd.DataFrame:
    """노드별 가치와 유한차분 기울기"""
    grid = solution.grid
    return pd.DataFrame(
        {"ell": grid.nodes, "lambda": grid.lambdas, "V": solution.V, "D": solution.D}
    )


def figure_starts(solution: Solution, n_paths: int) -> List[float]:
    """내부 노드에서 고르게 뽑은 초기 신념"""
    m = solution.grid.m
    indices = np.rint(np.linspace(1, 2 * m - 1, n_paths)).astype(int)
    return [float(solution.grid.lambdas[k]) for k in indices]


def sample_paths(
    solution: Solution, n_paths: int, periods: int, seed: int
) -> List[Path]:
    """그림용 경로 (캐스케이드 진입 후에도 기간 끝까지 진행)"""
    starts = figure_starts(solution, n_paths)
    paths = [
        simulate_path(
            solution, lam, periods, seed, path_id=i, stop_at_absorption=False
        )
        for i, lam in enumerate(starts)
    ]
    logger.info(f"그림용 경로 {len(paths)}개 생성 (기간 {periods}, seed={seed})")
    return paths


def sample_paths_frame(solution: Solution, n_paths: int, periods: int, seed: int) -> pd.DataFrame:
    """그림용 경로 표"""
    return paths_to_frame(sample_paths(solution, n_paths, periods, seed))
