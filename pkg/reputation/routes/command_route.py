"""
명령 실행기 - 명령 이름별 처리 함수와 산출물 목록
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional
import logging

import numpy as np

from reputation.routes.export_route import ArtifactWriter
from reputation.routes.figure_route import (
    policy_drift_frame,
    sample_paths_frame,
    value_fdiff_frame,
)
from reputation.schema.config_schema import RunConfig
from reputation.service.config_service import config_to_record
from reputation.service.dynamics_service import (
    classify,
    hitting_stats,
    hitting_to_record,
    paths_to_frame,
    simulate_path,
    welfare_mc,
)
from reputation.service.finite_service import (
    boundary_pathology_demo,
    convergence_to_infinite,
    finite_to_frame,
    solve_finite,
)
from reputation.service.outcome_service import (
    outcome_to_frame,
    rho_monotonicity_report,
    solve_outcomes,
)
from reputation.service.price_service import delta_bar, flex_to_frame, solve_flexible
from reputation.service.solver_service import (
    concavity_report,
    solution_to_frame,
    solution_to_record,
    solve,
)
from reputation.service.sweep_service import precision_sweep, sweep, sweep_to_frame
from reputation.utils.config import get_settings
from reputation.utils.error_handler import ConfigValidationError, InvalidParameterError

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig, ArtifactWriter], None]


def build_provenance(config: RunConfig, command: str) -> Dict[str, Any]:
    """모든 산출물에 붙는 출처 정보 (시각 정보 없이 결정적)"""
    return {
        "artifact_version": get_settings().ARTIFACT_VERSION,
        "command": command,
        "config": config_to_record(config),
        "seed": config.sim.seed,
    }


def run_solve(config: RunConfig, writer: ArtifactWriter) -> None:
    """solve -> solution.csv / solution.json"""
    solution = solve(config.model, config.solver)
    writer.table("solution", solution_to_frame(solution))
    writer.record("solution", solution_to_record(solution))


def run_finite(config: RunConfig, writer: ArtifactWriter) -> None:
    """finite -> finite.csv / finite.json (수렴 진단, 경계 병리 포함)"""
    finite = solve_finite(config.model, config.finite.T, config.solver)
    T_list = sorted(set(config.finite.T_list))
    writer.table("finite", finite_to_frame(finite))
    writer.record(
        "finite",
        {
            "T": finite.T,
            "tie_break": finite.tie_break,
            "seller_tie_break": finite.seller_tie_break,
            "v_down": finite.v_down,
            "v_up": finite.v_up,
            "convergence": convergence_to_infinite(config.model, T_list, config.solver),
            "boundary_pathology": boundary_pathology_demo(config.model),
        },
    )


def run_simulate(config: RunConfig, writer: ArtifactWriter) -> None:
    """simulate -> paths.csv / hitting.json"""
    sim = config.sim
    solution = solve(config.model, config.solver)
    stats = hitting_stats(solution, sim.lambda0, sim.n_paths, sim.T_max, sim.seed)
    paths = [
        simulate_path(solution, sim.lambda0, sim.T_max, sim.seed, path_id=i)
        for i in range(min(sim.n_export_paths, sim.n_paths))
    ]
    writer.table("paths", paths_to_frame(paths), force=True)
    writer.record(
        "hitting",
        hitting_to_record(stats, {"lambda0": sim.lambda0, "seed": sim.seed}),
        force=True,
    )


def run_classify(config: RunConfig, writer: ArtifactWriter) -> None:
    """classify -> pattern.json"""
    solution = solve(config.model, config.solver)
    report = classify(solution)
    record = report.model_dump()
    record["statics"] = solution.statics.model_dump()
    record["concavity"] = concavity_report(solution.V, solution.grid).model_dump()
    writer.record("pattern", record, force=True)


def run_welfare(config: RunConfig, writer: ArtifactWriter) -> None:
    """welfare -> welfare.json"""
    sim = config.sim
    solution = solve(config.model, config.solver)
    report = welfare_mc(solution, sim.lambda0, sim.n_paths, sim.horizon, sim.seed)
    record = report.model_dump()
    record["lambda0"] = sim.lambda0
    record["classification"] = classify(solution).classification.value
    writer.record("welfare", record, force=True)


def run_sweep(config: RunConfig, writer: ArtifactWriter) -> None:
    """sweep -> sweep.csv / sweep.json (점당 한 행)"""
    if not config.sweep.values:
        raise ConfigValidationError(
            "sweep.values 가 비어 있습니다", details={"field": "sweep.values"}
        )
    if config.sweep.axis == "q":
        rows = precision_sweep(
            config.model, config.sweep.values, config.solver, workers=config.sweep.workers
        )
    else:
        rows = sweep(
            config.model,
            config.sweep.axis,
            config.sweep.values,
            config.solver,
            workers=config.sweep.workers,
        )
    writer.table("sweep", sweep_to_frame(rows))
    writer.record("sweep", {"axis": config.sweep.axis, "rows": rows})


def run_price(config: RunConfig, writer: ArtifactWriter) -> None:
    """price -> price.csv / price.json (delta_bar 포함)"""
    price = config.price
    band = tuple(price.check_band) if price.check_band else None
    flex = solve_flexible(
        config.model,
        tuple(price.domain),
        price.m,
        price.tol,
        check_band=band,
    )
    record: Dict[str, Any] = {
        "delta": config.model.delta,
        "no_pooling": flex.no_pooling,
        "pooling_nodes": int(np.sum(flex.pooling)),
        "iterations": flex.iterations,
        "sup_residual": flex.sup_residual,
    }
    if price.compute_delta_bar:
        record["delta_bar"] = delta_bar(
            config.model,
            tuple(price.domain),
            price.m,
            price.tol_delta,
            check_band=band,
            n_probes=price.n_probes,
        ).model_dump()
    writer.table("price", flex_to_frame(flex))
    writer.record("price", record)


def run_outcomes(config: RunConfig, writer: ArtifactWriter) -> None:
    """outcomes -> outcomes.csv / outcomes.json"""
    outcome = config.outcome
    solution = solve_outcomes(config.model, outcome.rho, config.solver)
    benchmark = solve(config.model, config.solver)
    interior = solution.grid.interior
    bench_set = benchmark.theta[interior] > 0
    out_set = solution.theta[interior] > 0
    record: Dict[str, Any] = {
        "rho": outcome.rho,
        "w": solution.outcome.w,
        "iterations": solution.iterations,
        "display_discrepancy": solution.display_discrepancy,
        "investment_nodes": int(out_set.sum()),
        "benchmark_investment_nodes": int(bench_set.sum()),
        "contains_benchmark": bool(np.all(out_set[bench_set])),
    }
    if outcome.rho_values:
        record["rho_monotonicity"] = rho_monotonicity_report(
            config.model, outcome.rho_values, config.solver
        )
    writer.table("outcomes", outcome_to_frame(solution))
    writer.record("outcomes", record)


def run_figures(config: RunConfig, writer: ArtifactWriter) -> None:
    """figures -> 그림 데이터 CSV 세 개"""
    sim = config.sim
    solution = solve(config.model, config.solver)
    writer.table("figure_policy_drift", policy_drift_frame(solution), force=True)
    writer.table("figure_value_fdiff", value_fdiff_frame(solution), force=True)
    writer.table(
        "figure_paths",
        sample_paths_frame(solution, sim.figure_paths, sim.figure_periods, sim.seed),
        force=True,
    )


COMMANDS: Dict[str, Handler] = {
    "solve": run_solve,
    "finite": run_finite,
    "simulate": run_simulate,
    "classify": run_classify,
    "welfare": run_welfare,
    "sweep": run_sweep,
    "price": run_price,
    "outcomes": run_outcomes,
    "figures": run_figures,
}


def run_command(config: RunConfig, command: str, out_dir: Path, fmt: Optional[str] = None) -> List[str]:
    """
    명령 실행 후 기록한 파일 목록 반환

    Args:
        config: 검증된 실행 설정
        command: 명령 이름
        out_dir: 출력 디렉토리
        fmt: 출력 포맷 (없으면 설정 값)

    Returns:
        List[str]: 기록한 파일 경로
    """
    handler = COMMANDS.get(command)
    if handler is None:
        raise InvalidParameterError(
            f"알 수 없는 명령: {command} (가능: {', '.join(COMMANDS)})"
        )
    fmt = fmt or config.output.format
    writer = ArtifactWriter(Path(out_dir), fmt, build_provenance(config, command))
    logger.info(f"명령 실행: {command}, 출력={out_dir}, 포맷={fmt}")
    handler(config, writer)
    logger.info(f"명령 완료: {command}, 파일 {len(writer.written)}개")
    return writer.written
