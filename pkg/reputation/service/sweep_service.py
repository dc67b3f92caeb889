"""
비교정학 스윕 - 파라미터 한 축을 바꿔 가며 풀고 분류
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence
import logging

import numpy as np
import pandas as pd

from reputation.schema.extension_schema import SweepRow
from reputation.schema.model_schema import ModelParams
from reputation.schema.solver_schema import SolveOptions
from reputation.service.dynamics_service import classify
from reputation.service.model_service import make_params
from reputation.service.solver_service import solve
from reputation.utils.error_handler import InvalidParameterError, ReputationError

logger = logging.getLogger(__name__)

SWEEPABLE_AXES = ("v", "p", "q", "c", "delta", "epsilon")


def _solve_point(
    index: int, axis: str, value: float, params: ModelParams, opts: SolveOptions
) -> SweepRow:
    """스윕 한 점 계산 (점 단위 오류는 행에 기록)"""
    if axis == "epsilon":
        point_params = params
        point_opts = opts.model_copy(update={"epsilon": value})
    else:
        point_params = make_params(**{**params.model_dump(), axis: value})
        point_opts = opts

    try:
        solution = solve(point_params, point_opts)
    except ReputationError as e:
        logger.warning(f"스윕 점 {index} ({axis}={value}) 실패: {e.message}")
        return SweepRow(
            index=index,
            axis=axis,
            value=value,
            z=float("nan"),
            lambda_under=float("nan"),
            lambda_over=float("nan"),
            classification="Error",
            n_components=0,
            investment_nodes=0,
            max_Delta=float("nan"),
            iterations=0,
            error=e.message,
        )

    report = classify(solution)
    statics = solution.statics
    interior = solution.grid.interior
    invest = solution.theta[interior] > 0
    lambdas = solution.grid.lambdas[interior]
    return SweepRow(
        index=index,
        axis=axis,
        value=value,
        z=statics.z,
        lambda_under=statics.lambda_under,
        lambda_over=statics.lambda_over,
        classification=report.classification.value,
        n_components=len(report.components),
        investment_nodes=int(invest.sum()),
        investment_lambda_low=float(lambdas[invest].min()) if invest.any() else None,
        investment_lambda_high=float(lambdas[invest].max()) if invest.any() else None,
        max_Delta=float(np.max(solution.Delta[interior])),
        iterations=solution.iterations,
    )


def sweep(
    params: ModelParams,
    axis: str,
    values: Sequence[float],
    opts: Optional[SolveOptions] = None,
    workers: int = 1,
) -> List[SweepRow]:
    """
    한 축 스윕 (결과는 작업자 수와 무관하게 점 번호 순서)

    Args:
        params: 기준 파라미터
        axis: 바꿀 파라미터 이름 (v, p, q, c, delta, epsilon)
        values: 값 목록
        opts: 솔버 옵션
        workers: 병렬 작업자 수

    Returns:
        List[SweepRow]: 점별 결과
    """
    if axis not in SWEEPABLE_AXES:
        raise InvalidParameterError(
            f"스윕 축은 {', '.join(SWEEPABLE_AXES)} 중 하나여야 합니다: {axis}"
        )
    if not values:
        raise InvalidParameterError("스윕 값 목록이 비어 있습니다")
    opts = opts or SolveOptions()
    # 값 검증은 계산 전에 끝낸다
    for value in values:
        if axis == "epsilon":
            if not 0.0 <= value < 0.5:
                raise InvalidParameterError(f"epsilon 은 0 <= epsilon < 1/2 범위여야 합니다: {value}")
        else:
            make_params(**{**params.model_dump(), axis: value})

    logger.info(f"스윕 시작: axis={axis}, 점 수={len(values)}, workers={workers}")
    tasks = [(i, axis, float(value), params, opts) for i, value in enumerate(values)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(lambda task: _solve_point(*task), tasks))
    else:
        rows = [_solve_point(*task) for task in tasks]
    rows.sort(key=lambda row: row.index)
    logger.info(f"스윕 완료: {[row.classification for row in rows]}")
    return rows


def precision_sweep(
    params: ModelParams,
    q_values: Optional[Sequence[float]] = None,
    opts: Optional[SolveOptions] = None,
    workers: int = 1,
    z_values: Optional[Sequence[float]] = None,
) -> List[SweepRow]:
    """
    신호 정밀도 스윕 (q 또는 우도비 z = q/(1-q) 중 하나로 지정)

    점마다 임계값, 투자 집합, 최대 한계 유인을 기록한다. 투자 집합 크기의 증감 방향은 판정하지 않는다.
    """
    if (q_values is None) == (z_values is None):
        raise InvalidParameterError("q_values 와 z_values 중 정확히 하나를 지정해야 합니다")
    if z_values is not None:
        if any(not z > 1.0 for z in z_values):
            raise InvalidParameterError(f"z 는 1 보다 커야 합니다: {list(z_values)}")
        q_values = [z / (1.0 + z) for z in z_values]
    rows = sweep(params, "q", q_values, opts, workers)
    sizes = {row.value: row.investment_nodes for row in rows}
    logger.info(f"정밀도별 투자 노드 수: {sizes}")
    return rows


def sweep_to_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    """스윕 결과 표 (점당 한 행)"""
    columns = list(SweepRow.model_fields.keys())
    return pd.DataFrame([row.model_dump() for row in rows], columns=columns)
