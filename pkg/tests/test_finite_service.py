"""
유한 지평 후방귀납 테스트
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reputation.schema.solver_schema import SolveOptions
from reputation.service.finite_service import (
    boundary_pathology_demo,
    convergence_to_infinite,
    finite_to_frame,
    solve_finite,
)
from reputation.service.solver_service import solve
from reputation.utils.error_handler import InvalidParameterError


def test_single_period_is_myopic(fig1_params):
    finite = solve_finite(fig1_params, 1, SolveOptions(m=10))
    V1 = finite.V_at(1)
    # max(p(1-q), pq - c) = max(0.1, 0.08)
    assert_allclose(V1[1:-1], 0.1, atol=1e-12)
    assert_allclose(finite.theta[0], 0.0)
    assert finite.v_up[0] == pytest.approx(0.4)
    assert finite.v_down[0] == pytest.approx(0.0)


def test_long_horizon_matches_infinite(fig1_params):
    opts = SolveOptions(m=50, tol=1e-12)
    infinite = solve(fig1_params, opts)
    finite = solve_finite(fig1_params, 500, opts)
    bound = max(1e-10, fig1_params.delta**500 * fig1_params.p / (1.0 - fig1_params.delta))
    assert np.max(np.abs(finite.V_at(1) - infinite.V)) <= bound


def test_values_increase_with_horizon(fig1_params):
    report = convergence_to_infinite(fig1_params, [1, 2, 5, 20, 100], SolveOptions(m=20))
    assert report["pointwise_monotone"]
    assert report["gaps_monotone"]
    for row in report["rows"]:
        assert row["gap"] <= row["tail_bound"] + 1e-8


def test_convergence_rejects_unsorted_horizons(fig1_params):
    with pytest.raises(InvalidParameterError):
        convergence_to_infinite(fig1_params, [5, 2])


def test_invalid_horizon(fig1_params):
    with pytest.raises(InvalidParameterError):
        solve_finite(fig1_params, 0)


def test_boundary_pathology_depends_on_tie_break(fig1_params):
    record = boundary_pathology_demo(fig1_params)
    assert record["action_differs_across_tie_breaks"]
    assert record["actions"]["buy"]["after_H"] == 1
    assert record["actions"]["pass"]["after_H"] == 1
    assert record["actions"]["buy"]["after_L"] == 1
    assert record["actions"]["pass"]["after_L"] == 0


def test_finite_frame_has_period_column(fig1_params):
    finite = solve_finite(fig1_params, 3, SolveOptions(m=4))
    frame = finite_to_frame(finite)
    assert list(frame["period"].unique()) == [1, 2, 3]
    assert len(frame) == 3 * 9
