"""
명령행 실행과 산출물 테스트
"""

import json

import numpy as np
import pytest

from reputation.main import main
from reputation.routes.export_route import read_csv
from tests.conftest import FIG1

SMALL = {**FIG1, "solver.m": 10, "sim.n_paths": 200, "sim.T_max": 50, "sim.horizon": 50}


def _last_json(text):
    """로그 줄이 섞여도 마지막 JSON 레코드만 읽음"""
    lines = text.splitlines()
    start = max(i for i, line in enumerate(lines) if line == "{")
    return json.loads("\n".join(lines[start:]))


def _run(command, config_path, out_dir, *extra):
    return main([command, "--config", config_path, "--out", str(out_dir), *extra])


def test_solve_writes_csv_and_json(write_config, tmp_path, capsys):
    status = _run("solve", write_config(SMALL), tmp_path / "out")
    assert status == 0
    assert (tmp_path / "out" / "solution.csv").exists()
    record = json.loads((tmp_path / "out" / "solution.json").read_text(encoding="utf-8"))
    assert record["provenance"]["config"]["solver"]["m"] == 10
    assert "artifact_version" in record["provenance"]
    success = _last_json(capsys.readouterr().out)
    assert success["success"] is True
    assert len(success["data"]["files"]) == 2


def test_csv_carries_provenance_header(write_config, tmp_path):
    _run("solve", write_config(SMALL), tmp_path, "--format", "csv")
    lines = (tmp_path / "solution.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# artifact_version:")
    assert any(line.startswith("# config:") for line in lines)
    header = next(line for line in lines if not line.startswith("#"))
    assert header == "ell,lambda,V,theta,Delta,D"
    assert not (tmp_path / "solution.json").exists()


def test_figures_policy_and_determinism(write_config, tmp_path):
    config = write_config(FIG1)
    assert _run("figures", config, tmp_path / "a", "--seed", "7") == 0
    assert _run("figures", config, tmp_path / "b", "--seed", "7") == 0
    for name in ("figure_policy_drift.csv", "figure_value_fdiff.csv", "figure_paths.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    policy = read_csv(tmp_path / "a" / "figure_policy_drift.csv")
    outside = (policy["lambda"] <= 2 / 11 + 1e-9) | (policy["lambda"] >= 2 / 3 - 1e-9)
    assert (policy.loc[outside, "theta"] == 0).all()
    assert (policy.loc[~outside, "theta"] == 1).any()

    value = read_csv(tmp_path / "a" / "figure_value_fdiff.csv")
    assert np.all(np.diff(value["V"].to_numpy()) >= -1e-9)

    paths = read_csv(tmp_path / "a" / "figure_paths.csv")
    assert paths["path_id"].nunique() == 10
    assert len(paths) == 10 * 11


def test_simulate_is_byte_identical(write_config, tmp_path):
    config = write_config(SMALL)
    _run("simulate", config, tmp_path / "a", "--seed", "7")
    _run("simulate", config, tmp_path / "b", "--seed", "7")
    a = (tmp_path / "a" / "paths.csv").read_bytes()
    assert a == (tmp_path / "b" / "paths.csv").read_bytes()
    hitting = json.loads((tmp_path / "a" / "hitting.json").read_text(encoding="utf-8"))
    assert hitting["result"]["seed"] == 7


def test_sweep_over_cost(write_config, tmp_path):
    config = write_config({**SMALL, "sweep.axis": "c", "sweep.values": [0.1, 0.22, 0.35]})
    assert _run("sweep", config, tmp_path) == 0
    frame = read_csv(tmp_path / "sweep.csv")
    assert len(frame) == 3
    assert list(frame["index"]) == [0, 1, 2]
    assert set(frame["classification"]) <= {"EarlyResolution", "DoubleHump", "NoInvestment", "Other"}


def test_sweep_xlsx(write_config, tmp_path):
    config = write_config({**SMALL, "sweep.axis": "q", "sweep.values": [0.6, 0.75, 0.9]})
    assert _run("sweep", config, tmp_path, "--format", "xlsx") == 0
    assert (tmp_path / "sweep.xlsx").exists()
    frame = read_csv(tmp_path / "sweep.csv")
    assert np.all(np.diff(frame["lambda_under"].to_numpy()) < 0)
    assert np.all(np.diff(frame["lambda_over"].to_numpy()) > 0)


@pytest.mark.parametrize(
    "command, expected",
    [
        ("classify", ["pattern.json"]),
        ("welfare", ["welfare.json"]),
        ("finite", ["finite.csv", "finite.json"]),
        ("outcomes", ["outcomes.csv", "outcomes.json"]),
    ],
)
def test_other_commands_write_outputs(write_config, tmp_path, command, expected):
    document = {**SMALL, "finite.T": 5, "finite.T_list": [1, 2, 5], "outcome.rho_values": [0.6, 0.7]}
    assert _run(command, write_config(document), tmp_path) == 0
    for name in expected:
        assert (tmp_path / name).exists()


def test_price_command(write_config, tmp_path):
    document = {**SMALL, "price.m": 5, "price.tol_delta": 0.1}
    assert _run("price", write_config(document), tmp_path) == 0
    record = json.loads((tmp_path / "price.json").read_text(encoding="utf-8"))
    assert "delta_bar" in record["result"]


def test_invalid_config_exits_with_error_record(write_config, tmp_path, capsys):
    status = _run("solve", write_config({**FIG1, "q": 0.5}), tmp_path)
    assert status == 2
    record = _last_json(capsys.readouterr().err)
    assert record["success"] is False
    assert record["error_code"] == "CONFIG_VALIDATION"


def test_empty_sweep_is_rejected(write_config, tmp_path, capsys):
    status = _run("sweep", write_config(SMALL), tmp_path)
    assert status == 2
    assert _last_json(capsys.readouterr().err)["success"] is False
