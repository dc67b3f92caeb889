"""
공개 결과 관측 확장 테스트
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from reputation.schema.model_schema import Outcome
from reputation.schema.solver_schema import SolveOptions
from reputation.service.dynamics_service import hitting_stats
from reputation.service.model_service import belief_from_probability
from reputation.service.outcome_service import (
    outcome_hitting_stats,
    outcome_marginal_incentive,
    outcome_to_frame,
    outcome_update,
    rho_monotonicity_report,
    solve_outcomes,
)
from reputation.service.solver_service import solve
from reputation.utils.error_handler import DomainError, InvalidParameterError


def test_outcome_update_examples():
    even = belief_from_probability(0.5)
    assert outcome_update(even, 1, Outcome.G, 3.0, 3.0).lam == pytest.approx(0.9)
    assert outcome_update(even, 1, Outcome.B, 3.0, 3.0).lam == pytest.approx(0.5)
    assert outcome_update(even, 0, Outcome.NONE, 3.0, 3.0).lam == pytest.approx(0.25)


def test_revealing_outcome_resolves_belief():
    even = belief_from_probability(0.5)
    assert outcome_update(even, 1, Outcome.G, 3.0, float("inf")).lam == 1.0
    assert outcome_update(even, 1, Outcome.B, 3.0, float("inf")).lam == 0.0


def test_outcome_update_rejects_inconsistent_pairs():
    even = belief_from_probability(0.5)
    with pytest.raises(DomainError):
        outcome_update(even, 1, Outcome.NONE, 3.0, 3.0)
    with pytest.raises(DomainError):
        outcome_update(even, 0, Outcome.G, 3.0, 3.0)


def test_outcome_update_frozen_in_cascade(fig1_statics):
    high = belief_from_probability(0.9)
    assert outcome_update(high, 1, Outcome.B, 3.0, 3.0, statics=fig1_statics) == high


@given(st.floats(min_value=0.51, max_value=0.99), st.floats(min_value=0.51, max_value=1.0))
@settings(max_examples=200, deadline=None)
def test_coefficients_sum_to_signal_weight(q, rho):
    assert (q + rho - 1.0) + (q - rho) == pytest.approx(2.0 * q - 1.0, abs=1e-12)


def test_marginal_incentive_is_linear_in_rho(fig1_params):
    """고정 연속 가치에서 d Delta / d rho = delta (V_G - V_B)"""
    v_good, v_bad, v_pass = 4.0, 2.5, 1.0
    a = outcome_marginal_incentive(v_good, v_bad, v_pass, fig1_params, 0.6)
    b = outcome_marginal_incentive(v_good, v_bad, v_pass, fig1_params, 0.7)
    assert (b - a) / 0.1 == pytest.approx(fig1_params.delta * (v_good - v_bad), abs=1e-9)


def test_recovers_benchmark_as_outcomes_become_uninformative(fig1_params):
    opts = SolveOptions(m=10, tol=1e-12)
    benchmark = solve(fig1_params, opts)
    outcome = solve_outcomes(fig1_params, 0.5 + 1e-9, opts)
    assert np.max(np.abs(outcome.V - benchmark.V)) <= 1e-6
    assert np.max(np.abs(outcome.Delta - benchmark.Delta)) <= 1e-6


def test_investment_set_contains_benchmark(fig1_params, fig1_solution):
    outcome = solve_outcomes(fig1_params, 0.75, SolveOptions(m=50))
    interior = fig1_solution.grid.interior
    bench = fig1_solution.theta[interior] > 0
    assert np.all(outcome.theta[interior][bench] > 0)


def test_printed_display_differs_by_pass_term(fig1_params):
    outcome = solve_outcomes(fig1_params, 0.75, SolveOptions(m=10))
    sl = outcome.grid.interior
    expected = 2.0 * fig1_params.delta * (2.0 * fig1_params.q - 1.0) * outcome.V_pass[sl]
    assert_allclose(outcome.Delta_printed[sl] - outcome.Delta[sl], expected, atol=1e-12)
    assert outcome.display_discrepancy >= 0.0


def test_revealing_branch(fig1_params):
    outcome = solve_outcomes(fig1_params, 1.0, SolveOptions(m=10))
    sl = outcome.grid.interior
    assert_allclose(outcome.V_good[sl], outcome.v_up)
    assert_allclose(outcome.V_bad[sl], outcome.v_down)


def test_invalid_rho(fig1_params):
    with pytest.raises(InvalidParameterError):
        solve_outcomes(fig1_params, 0.5)


def test_rho_monotonicity_report_accounts_for_every_node(fig1_params):
    report = rho_monotonicity_report(fig1_params, [0.55, 0.65, 0.75, 0.85], SolveOptions(m=5))
    assert len(report["pairs"]) == 3
    for pair in report["pairs"]:
        assert pair["checked"] + pair["excluded"] == 9
        assert 0 <= pair["violations"] <= pair["checked"]


def test_rho_monotonicity_fails_pointwise_on_default_grid(fig1_params):
    report = rho_monotonicity_report(fig1_params, [0.55, 0.65, 0.75, 0.85], SolveOptions(m=50))
    assert report["checked"] == 297
    assert report["excluded"] == 0
    assert report["violations"] == 63
    worst = max(pair["max_decrease"] for pair in report["pairs"])
    assert worst == pytest.approx(0.141, abs=1e-3)


def test_outcomes_do_not_slow_exit_to_up(fig1_params, fig1_solution):
    outcome = solve_outcomes(fig1_params, 0.9, SolveOptions(m=50))
    bench = hitting_stats(fig1_solution, 0.40, 2000, 200, seed=17)
    observed = outcome_hitting_stats(outcome, 0.40, 2000, 200, seed=17)
    assert observed.mean_tau_up <= bench.mean_tau_up


def test_outcome_frame_has_rho_column(fig1_params):
    frame = outcome_to_frame(solve_outcomes(fig1_params, 0.75, SolveOptions(m=5)))
    assert (frame["rho"] == 0.75).all()
