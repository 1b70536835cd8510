import numpy as np
import pytest

from swarmretreat import (
    SEARCH,
    SEARCH_BLOCKED,
    TRANSPORT,
    TRANSPORT_BLOCKED,
    CtmcConfig,
    InvalidInputError,
    SwarmParams,
    UnboundedObjectiveError,
    build_generator,
    closed_form_optimal_density,
    closed_form_steady_state,
    cycle_time_constant,
    monte_carlo_occupancy,
    objective,
    optimal_density,
    steady_state,
    swarm_throughput,
    throughput_asymptote,
)

PARAMS = SwarmParams(
    r=0.05, delta=0.11, v=1.0, lambda_p=1.0, lambda_d=1.0, lambda_in=0.0, rho=2.44
)
CFG = CtmcConfig(params=PARAMS, cost_c=0.05)


def _random_config(rng):
    p = SwarmParams(
        r=0.0,
        delta=rng.uniform(0.02, 0.5),
        v=rng.uniform(0.1, 3.0),
        lambda_p=rng.uniform(0.1, 6.0),
        lambda_d=rng.uniform(0.1, 6.0),
        lambda_in=0.0,
        rho=rng.uniform(0.2, 8.0),
    )
    return CtmcConfig(params=p, cost_c=rng.uniform(0.001, 0.5))


def test_generator_rows_sum_to_zero_with_nonnegative_off_diagonals():
    q = build_generator(CFG, 0.99).entries
    assert np.max(np.abs(q.sum(axis=1))) < 1e-14
    off = q - np.diag(np.diag(q))
    assert np.min(off) >= 0.0


def test_generator_rejects_negative_density():
    with pytest.raises(InvalidInputError):
        build_generator(CFG, -0.1)


def test_steady_state_reference_values():
    sol = steady_state(build_generator(CFG, 0.99))
    assert sol.pi[SEARCH] == pytest.approx(0.40739683781488506, abs=1e-12)
    assert sol.pi[SEARCH_BLOCKED] == pytest.approx(0.09260316218511484, abs=1e-12)
    assert sol.pi[TRANSPORT] == pytest.approx(0.40739683781488506, abs=1e-12)
    assert sol.pi[TRANSPORT_BLOCKED] == pytest.approx(0.09260316218511484, abs=1e-12)
    assert sol.per_robot_delivery_rate == pytest.approx(0.08962730431927471, abs=1e-12)


def test_steady_state_solves_the_balance_equations():
    gen = build_generator(CFG, 0.99)
    sol = steady_state(gen)
    assert np.max(np.abs(sol.pi @ gen.entries)) < 1e-12
    assert sol.pi.sum() == pytest.approx(1.0, abs=1e-12)


def test_numeric_matches_closed_form_on_random_draws():
    rng = np.random.default_rng(2024)
    for _ in range(300):
        cfg = _random_config(rng)
        lam = rng.uniform(0.01, 15.0)
        num = steady_state(build_generator(cfg, lam))
        closed = closed_form_steady_state(cfg, lam)
        assert np.max(np.abs(num.pi - closed.pi)) < 1e-9
        assert num.per_robot_delivery_rate == pytest.approx(
            closed.per_robot_delivery_rate, abs=1e-9
        )


def test_blocked_to_unblocked_ratio_is_encounter_over_resolution_rate():
    from swarmretreat import encounter_rate

    lam = 1.7
    sol = steady_state(build_generator(CFG, lam))
    ratio = encounter_rate(PARAMS, lam) / PARAMS.rho
    assert sol.pi[SEARCH_BLOCKED] / sol.pi[SEARCH] == pytest.approx(ratio, rel=1e-10)
    assert sol.pi[TRANSPORT_BLOCKED] / sol.pi[TRANSPORT] == pytest.approx(ratio, rel=1e-10)


def test_monte_carlo_occupancy_agrees_with_steady_state():
    rng = np.random.default_rng(314)
    sol = steady_state(build_generator(CFG, 0.99))
    mc = monte_carlo_occupancy(CFG, 0.99, horizon=40_000.0, rng=rng)
    assert np.max(np.abs(mc.pi - sol.pi)) < 0.02


def test_cycle_time_constant_reference_value():
    assert cycle_time_constant(CFG) == pytest.approx(1.0 / 0.22 + 1.0 / 0.22, rel=1e-12)


def test_throughput_reference_value_and_asymptote():
    assert swarm_throughput(CFG, 0.99) == pytest.approx(0.08873103127608198, abs=1e-12)
    assert throughput_asymptote(CFG) == pytest.approx(0.47909287967244335, abs=1e-12)


def test_throughput_increases_toward_but_never_reaches_the_asymptote():
    cap = throughput_asymptote(CFG)
    lams = np.linspace(0.01, 200.0, 500)
    qs = np.array([swarm_throughput(CFG, x) for x in lams])
    assert np.all(np.diff(qs) > 0)
    assert np.all(qs < cap)
    assert qs[-1] > 0.95 * cap


def test_objective_is_throughput_minus_linear_cost():
    lam = 3.0
    assert objective(CFG, lam) == pytest.approx(
        swarm_throughput(CFG, lam) - CFG.cost_c * lam, abs=1e-15
    )


def test_closed_form_optimum_reference_value():
    assert closed_form_optimal_density(CFG) == pytest.approx(2.104697256441567, abs=1e-9)


def test_numeric_optimum_matches_closed_form_on_random_draws():
    rng = np.random.default_rng(77)
    checked = 0
    while checked < 60:
        cfg = _random_config(rng)
        ac = cycle_time_constant(cfg) * cfg.cost_c
        if not 0.0 < ac < 1.0:
            continue
        checked += 1
        closed = closed_form_optimal_density(cfg)
        num = optimal_density(cfg)
        assert num.value == pytest.approx(closed, rel=1e-6)


def test_costlier_deployment_means_lower_optimum():
    prev = np.inf
    for c in (0.01, 0.05, 0.1, 0.2):
        cur = closed_form_optimal_density(CtmcConfig(params=PARAMS, cost_c=c))
        assert cur < prev
        prev = cur


def test_degenerate_when_cost_dominates():
    # A*C >= 1: staying home is optimal
    cfg = CtmcConfig(params=PARAMS, cost_c=0.5)
    assert cycle_time_constant(cfg) * cfg.cost_c >= 1.0
    assert closed_form_optimal_density(cfg) == 0.0
    num = optimal_density(cfg)
    assert num.value == 0.0
    assert num.degenerate
    assert "degenerate" in num.report().lower()


def test_zero_cost_has_no_interior_maximum():
    with pytest.raises(UnboundedObjectiveError):
        optimal_density(CtmcConfig(params=PARAMS, cost_c=0.0))
