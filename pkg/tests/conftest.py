"""
공통 픽스처 - 기준 파라미터와 해
"""

import json

import pytest

from reputation.schema.solver_schema import SolveOptions
from reputation.service.model_service import derive_statics, make_params
from reputation.service.solver_service import solve

FIG1 = {"v": 1.0, "p": 0.40, "q": 0.75, "c": 0.22, "delta": 0.92}


@pytest.fixture(scope="session")
def fig1_params():
    return make_params(**FIG1)


@pytest.fixture(scope="session")
def fig1_statics(fig1_params):
    return derive_statics(fig1_params)


@pytest.fixture(scope="session")
def fig1_solution(fig1_params):
    return solve(fig1_params, SolveOptions(m=50, tol=1e-10))


@pytest.fixture(scope="session")
def small_solution(fig1_params):
    """m=2 격자 (내부 노드 1, 2, 3)"""
    return solve(fig1_params, SolveOptions(m=2, tol=1e-12))


@pytest.fixture
def write_config(tmp_path):
    """설정 딕셔너리를 JSON 파일로 기록하고 경로 반환"""

    def _write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return _write
