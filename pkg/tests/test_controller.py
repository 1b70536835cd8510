import math

import numpy as np
import pytest

from swarmretreat import (
    Action,
    ControllerConfig,
    DensityEstimate,
    InvalidInputError,
    decide,
    ensemble_step,
    epsilon,
    retreat_probability,
    simulate_ensemble,
    verify_feedback_linearization,
)

CFG = ControllerConfig(lambda_star=2.1, k_p=0.5, dt=0.5, lambda_in=0.1)


def test_epsilon_is_zero_at_and_below_the_set_point():
    assert epsilon(CFG, 0.0) == 0.0
    assert epsilon(CFG, 2.1) == 0.0
    assert epsilon(CFG, 2.0999) == 0.0


def test_epsilon_reference_value_above_set_point():
    # (0.1 + 0.5*(3 - 2.1)) / 3
    assert epsilon(CFG, 3.0) == pytest.approx(0.55 / 3.0, abs=1e-15)


def test_epsilon_rejects_negative_estimate():
    with pytest.raises(InvalidInputError):
        epsilon(CFG, -0.1)


def test_retreat_probability_clamps_to_one():
    hot = ControllerConfig(lambda_star=0.1, k_p=100.0, dt=10.0, lambda_in=0.1)
    assert retreat_probability(hot, 50.0) == 1.0
    assert retreat_probability(CFG, 1.0) == 0.0


def test_decide_abstains_without_an_estimate():
    d = decide(CFG, None, np.random.default_rng(0))
    assert d.action is Action.STAY
    assert not d.ready
    assert d.epsilon_used == 0.0


def test_decide_frequency_matches_probability():
    rng = np.random.default_rng(5)
    est = DensityEstimate(value=3.0, sample_count=12, at_time=7.0)
    p = retreat_probability(CFG, 3.0)
    n = 20_000
    hits = sum(decide(CFG, est, rng).action is Action.RETREAT for _ in range(n))
    sigma = math.sqrt(n * p * (1 - p))
    assert abs(hits - n * p) < 4 * sigma


def test_decide_never_retreats_below_set_point():
    rng = np.random.default_rng(6)
    est = DensityEstimate(value=1.0, sample_count=3, at_time=1.0)
    assert all(decide(CFG, est, rng).action is Action.STAY for _ in range(1000))


def test_control_law_cancels_influx_above_set_point():
    rng = np.random.default_rng(8)
    for lam in CFG.lambda_star + rng.uniform(1e-6, 50.0, 200):
        assert verify_feedback_linearization(CFG, lam) < 1e-12


def test_config_validation():
    with pytest.raises(InvalidInputError):
        ControllerConfig(lambda_star=-1.0, k_p=0.5, dt=0.5, lambda_in=0.1)
    with pytest.raises(InvalidInputError):
        ControllerConfig(lambda_star=2.0, k_p=0.0, dt=0.5, lambda_in=0.1)
    with pytest.raises(InvalidInputError):
        ControllerConfig(lambda_star=2.0, k_p=0.5, dt=0.0, lambda_in=0.1)


def test_ensemble_decays_exponentially_toward_the_set_point():
    cfg = ControllerConfig(lambda_star=2.0, k_p=0.5, dt=0.01, lambda_in=0.05)
    ts, lams = simulate_ensemble(cfg, 3.0, 2.0, 0.01)
    analytic = 2.0 + np.exp(-0.5 * ts)
    assert np.max(np.abs(lams - analytic)) < 1e-6


def test_ensemble_grows_at_influx_rate_below_set_point():
    cfg = ControllerConfig(lambda_star=5.0, k_p=0.5, dt=0.01, lambda_in=0.2)
    ts, lams = simulate_ensemble(cfg, 1.0, 10.0, 0.01)
    assert lams[-1] == pytest.approx(1.0 + 0.2 * 10.0, abs=1e-9)


def test_ensemble_slides_on_the_set_point_without_chattering():
    """Once the trajectory reaches the switching surface it stays on it."""
    cfg = ControllerConfig(lambda_star=2.0, k_p=1.0, dt=0.05, lambda_in=0.3)
    ts, lams = simulate_ensemble(cfg, 1.0, 30.0, 0.05)
    tail = lams[ts > 20.0]
    assert np.max(np.abs(tail - 2.0)) < 1e-9


def test_ensemble_step_rejects_negative_density():
    with pytest.raises(InvalidInputError):
        ensemble_step(CFG, -0.5, 0.01)
