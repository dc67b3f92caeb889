"""
유연 가격 확장 테스트
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reputation.schema.model_schema import Signal
from reputation.service.model_service import buyer_action, derive_statics, make_params
from reputation.service.price_service import (
    bisect_threshold,
    delta_bar,
    flex_to_frame,
    price_set,
    solve_flexible,
)
from reputation.utils.error_handler import ConvergenceError, DomainError, InvalidParameterError
from tests.conftest import FIG1


def test_price_set_at_even_odds():
    prices = price_set(0.5, 1.0, 3.0)
    assert prices.p_low == pytest.approx(0.25, abs=1e-12)
    assert prices.p_high == pytest.approx(0.75, abs=1e-12)


def test_price_set_collapses_upward():
    prices = price_set(1.0 - 1e-9, 1.0, 3.0)
    assert prices.p_low > 0.999
    assert prices.p_high > 0.999
    with pytest.raises(DomainError):
        price_set(1.0, 1.0, 3.0)


@given(
    st.floats(min_value=0.01, max_value=0.99),
    st.floats(min_value=0.55, max_value=0.95),
)
@settings(max_examples=200, deadline=None)
def test_interior_price_induces_signal_following(lam, q):
    z = q / (1.0 - q)
    prices = price_set(lam, 1.0, z)
    assert 0.0 < prices.p_low < prices.p_high < 1.0
    price = 0.5 * (prices.p_low + prices.p_high)
    statics = derive_statics(make_params(v=1.0, p=price, q=q, c=0.1, delta=0.9))
    r = lam / (1.0 - lam)
    assert buyer_action(r, Signal.H, statics) == 1
    assert buyer_action(r, Signal.L, statics) == 0


def test_flexible_price_structure(fig1_params):
    flex = solve_flexible(fig1_params.model_copy(update={"delta": 0.95}), m=10)
    informative = ~flex.pooling
    assert np.all(flex.price[informative] > flex.p_low[informative])
    assert np.all(flex.price[informative] <= flex.p_high[informative])
    assert np.all(flex.price[flex.pooling] == flex.p_low[flex.pooling])
    assert flex.h * flex.m == pytest.approx(math.log(3.0), abs=1e-12)
    assert np.all(flex.lambdas >= 0.01 - 1e-12) and np.all(flex.lambdas <= 0.99 + 1e-12)


def test_top_node_pools_under_patience(fig1_params):
    flex = solve_flexible(fig1_params.model_copy(update={"delta": 0.95}), m=10)
    assert flex.pooling[-1]
    assert not flex.no_pooling


def test_myopic_limit_matches_static_comparison():
    flex = solve_flexible({"v": 1.0, "q": 0.75, "c": 0.22, "delta": 0.01}, m=10)
    myopic_info = np.maximum(flex.p_high * 0.25, flex.p_high * 0.75 - 0.22)
    margin = flex.p_low - myopic_info
    clear = np.abs(margin) > 0.05
    assert clear.any()
    assert np.array_equal(flex.pooling[clear], margin[clear] > 0)


def test_invalid_domain(fig1_params):
    with pytest.raises(InvalidParameterError):
        solve_flexible(fig1_params, domain=(0.5, 0.4))


def test_bisection_finds_threshold():
    result = bisect_threshold(lambda x: x > 0.3, 0.05, 0.95, 1e-3)
    assert result.found
    assert result.threshold == pytest.approx(0.3, abs=1e-3)
    assert result.bracket[1] - result.bracket[0] <= 1e-3


def test_bisection_coarse_tolerance_takes_one_step():
    result = bisect_threshold(lambda x: x > 0.3, 0.0, 1.0, 0.5)
    assert result.found
    assert result.steps <= 1


def test_bisection_not_found():
    result = bisect_threshold(lambda x: False, 0.05, 0.95, 1e-3)
    assert not result.found
    assert result.reason
    always = bisect_threshold(lambda x: True, 0.05, 0.95, 1e-3)
    assert not always.found


def test_bisection_reports_monotonicity_violation():
    def predicate(x):
        return x > 0.3 and not (0.6 < x < 0.7)

    result = bisect_threshold(predicate, 0.05, 0.95, 1e-3, n_probes=9)
    assert result.monotone_violations == 1
    assert result.found
    assert result.threshold == pytest.approx(0.3, abs=1e-3)


def test_delta_bar_not_found_when_top_node_pools():
    result = delta_bar({k: FIG1[k] for k in ("v", "q", "c", "delta")}, m=5, tol_delta=0.05)
    assert not result.found


def test_flex_frame(fig1_params):
    frame = flex_to_frame(solve_flexible(fig1_params, m=5))
    assert "pooling" in frame.columns and "price" in frame.columns


def test_delta_bar_brackets_threshold_inside_band():
    flex_params = {k: FIG1[k] for k in ("v", "q", "c", "delta")}
    band = (0.2, 0.8)
    result = delta_bar(flex_params, m=10, tol_delta=1e-3, check_band=band)
    assert result.found
    lo, hi = result.bracket
    assert 0.0 < lo < hi < 1.0
    assert hi - lo <= 1e-3
    assert lo <= result.threshold <= hi
    assert result.threshold == pytest.approx(0.3806, abs=2e-3)
    below = solve_flexible({**flex_params, "delta": lo}, m=10, tol=1e-8, check_band=band)
    above = solve_flexible({**flex_params, "delta": hi}, m=10, tol=1e-8, check_band=band)
    assert not below.no_pooling
    assert above.no_pooling


def test_flexible_non_convergence_raises(fig1_params):
    with pytest.raises(ConvergenceError) as exc_info:
        solve_flexible(fig1_params, m=10, tol=1e-12, max_iter=2)
    assert exc_info.value.details["iterations"] == 2
