"""
모델 핵심 로직 테스트
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from reputation.schema.model_schema import Region, Signal
from reputation.service.model_service import (
    action_likelihoods,
    bayes_action_update,
    belief_from_log_odds,
    belief_from_probability,
    buyer_action,
    derive_statics,
    make_params,
    myopic_policy,
    purchase_probability,
    region_of,
)
from reputation.utils.error_handler import DomainError, InvalidParameterError
from tests.conftest import FIG1


def test_derive_statics_thresholds(fig1_statics):
    s = fig1_statics
    assert s.z == pytest.approx(3.0, abs=1e-12)
    assert s.K == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert s.lambda_under == pytest.approx(2.0 / 11.0, abs=1e-12)
    assert s.lambda_over == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert s.eta == pytest.approx(1.1, abs=1e-12)
    assert s.ell_over - s.ell_under == pytest.approx(2.0 * math.log(3.0), abs=1e-12)


@pytest.mark.parametrize(
    "field, value, fragment",
    [
        ("q", 0.5, "1/2 < q < 1"),
        ("q", 1.0, "1/2 < q < 1"),
        ("p", 1.2, "0 < p < v"),
        ("delta", 1.0, "0 < delta < 1"),
        ("c", 0.0, "c > 0"),
    ],
)
def test_make_params_rejects_invalid(field, value, fragment):
    with pytest.raises(InvalidParameterError) as exc_info:
        make_params(**{**FIG1, field: value})
    assert fragment in exc_info.value.message


def test_region_boundaries_belong_to_cascades(fig1_statics):
    s = fig1_statics
    assert region_of(belief_from_probability(s.lambda_under), s) == Region.DOWN_CASCADE
    assert region_of(belief_from_probability(s.lambda_over), s) == Region.UP_CASCADE
    assert region_of(belief_from_probability(0.40), s) == Region.EXPERIMENTATION


def test_buyer_follows_signal_in_experimentation(fig1_statics):
    r = 0.40 / 0.60
    assert buyer_action(r, Signal.H, fig1_statics) == 1
    assert buyer_action(r, Signal.L, fig1_statics) == 0


def test_buyer_tie_break_at_upper_threshold(fig1_statics):
    r = fig1_statics.r_over
    assert buyer_action(r, Signal.L, fig1_statics, tie_break="buy") == 1
    assert buyer_action(r, Signal.L, fig1_statics, tie_break="pass") == 0


def test_buyer_action_rejects_nonpositive_odds(fig1_statics):
    with pytest.raises(DomainError):
        buyer_action(0.0, Signal.H, fig1_statics)


def test_action_likelihoods_rows():
    assert action_likelihoods(Region.EXPERIMENTATION, 0.75) == (0.75, 0.25)
    assert action_likelihoods(Region.UP_CASCADE, 0.75) == (1.0, 1.0)
    assert action_likelihoods(Region.DOWN_CASCADE, 0.75) == (0.0, 0.0)
    assert action_likelihoods(Region.DOWN_CASCADE, 0.75, epsilon=0.1) == (0.1, 0.1)
    assert purchase_probability(Region.EXPERIMENTATION, 0.5, 0.75) == pytest.approx(0.5)


def test_bayes_update_reaches_upper_threshold(fig1_statics):
    updated = bayes_action_update(belief_from_probability(0.40), 1, fig1_statics)
    assert updated.lam == pytest.approx(2.0 / 3.0, abs=1e-12)
    lowered = bayes_action_update(belief_from_probability(0.40), 0, fig1_statics)
    assert lowered.lam == pytest.approx(2.0 / 11.0, abs=1e-12)


def test_bayes_update_frozen_in_cascades(fig1_statics):
    for lam in (0.1, 0.9, 0.0, 1.0):
        belief = belief_from_probability(lam)
        assert bayes_action_update(belief, 1, fig1_statics) == belief
        assert bayes_action_update(belief, 0, fig1_statics) == belief


def test_bayes_update_rejects_bad_action(fig1_statics):
    with pytest.raises(DomainError):
        bayes_action_update(belief_from_probability(0.4), 2, fig1_statics)


@given(st.floats(min_value=0.19, max_value=0.66))
@settings(max_examples=200, deadline=None)
def test_interior_step_is_log_z(lam):
    statics = derive_statics(make_params(**FIG1))
    belief = belief_from_probability(lam)
    up = bayes_action_update(belief, 1, statics)
    down = bayes_action_update(belief, 0, statics)
    assert up.ell - belief.ell == pytest.approx(math.log(3.0), abs=1e-9)
    assert belief.ell - down.ell == pytest.approx(math.log(3.0), abs=1e-9)


def test_degenerate_beliefs():
    assert belief_from_probability(0.0).ell == -math.inf
    assert belief_from_probability(1.0).ell == math.inf
    assert belief_from_log_odds(0.0).lam == pytest.approx(0.5)
    assert belief_from_log_odds(-800.0).lam == pytest.approx(0.0)
    with pytest.raises(DomainError):
        belief_from_probability(1.5)


def test_myopic_policy():
    assert myopic_policy(Region.EXPERIMENTATION, 0.5) == 1
    assert myopic_policy(Region.EXPERIMENTATION, 1.1) == 0
    assert myopic_policy(Region.EXPERIMENTATION, 1.0) == 0
    assert myopic_policy(Region.UP_CASCADE, 0.5) == 0
    with pytest.raises(InvalidParameterError):
        myopic_policy(Region.EXPERIMENTATION, 0.0)


@pytest.mark.parametrize("q", [0.6, 0.75, 0.9])
def test_likelihood_ratios_are_z(q):
    statics = derive_statics(make_params(**{**FIG1, "q": q}))
    psi1, psi0 = action_likelihoods(Region.EXPERIMENTATION, q)
    assert psi1 / psi0 == pytest.approx(statics.z, rel=1e-12)
    assert (1.0 - psi1) / (1.0 - psi0) == pytest.approx(1.0 / statics.z, rel=1e-12)


@given(st.floats(min_value=0.19, max_value=0.39))
@settings(max_examples=200, deadline=None)
def test_buy_then_pass_returns_to_start(lam):
    statics = derive_statics(make_params(**FIG1))
    belief = belief_from_probability(lam)
    bought = bayes_action_update(belief, 1, statics)
    assert region_of(bought, statics) == Region.EXPERIMENTATION
    back = bayes_action_update(bought, 0, statics)
    assert back.ell == pytest.approx(belief.ell, abs=1e-9)
    assert back.lam == pytest.approx(lam, abs=1e-9)
