"""Per-robot behavioral CTMC, its steady state, and the optimal density.

The chain has four states: Search, SearchBlocked, Transport,
TransportBlocked. Task progress moves Search -> Transport at the pick-up
rate and Transport -> Search at the drop-off rate (one delivery per cycle);
encounters interrupt either task state into its blocked twin at the
encounter rate, resolved back at rho without resetting task progress.

Area throughput is Q(lambda) = lambda * (per-robot delivery rate), which is
monotone increasing, so the deployment objective subtracts a linear
per-robot cost: J(lambda) = Q(lambda) - C*lambda. J has the closed-form
maximizer lambda_star = (rho/c) * (1/sqrt(A*C) - 1) for 0 < A*C < 1, with
A = 1/omega_p + 1/omega_d and c the encounter sweep coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidInputError, NumericalFailureError, UnboundedObjectiveError
from .rates import SwarmParams, encounter_rate, sweep_coefficient, task_rates

# State indices.
SEARCH, SEARCH_BLOCKED, TRANSPORT, TRANSPORT_BLOCKED = 0, 1, 2, 3
STATE_NAMES = ("Search", "SearchBlocked", "Transport", "TransportBlocked")

_GENERATOR_TOL = 1e-12


@dataclass(frozen=True)
class CtmcConfig:
    params: SwarmParams
    cost_c: float   # per-robot deployment cost rate (deliveries per robot per time)

    def __post_init__(self):
        if self.cost_c < 0:
            raise InvalidInputError(f"cost_c must be >= 0, got {self.cost_c}")


@dataclass(frozen=True)
class GeneratorMatrix:
    """4x4 transition-rate matrix with the density it was built at."""

    entries: np.ndarray
    lambda_used: float

    def __post_init__(self):
        q = np.asarray(self.entries, dtype=float)
        if q.shape != (4, 4):
            raise InvalidInputError(f"generator must be 4x4, got {q.shape}")
        off = q[~np.eye(4, dtype=bool)]
        if np.any(off < 0):
            raise InvalidInputError("off-diagonal rates must be nonnegative")
        if np.max(np.abs(q.sum(axis=1))) > _GENERATOR_TOL:
            raise InvalidInputError("generator rows must sum to zero")


@dataclass(frozen=True)
class CtmcSolution:
    pi_search: float
    pi_search_blocked: float
    pi_transport: float
    pi_transport_blocked: float
    per_robot_delivery_rate: float
    lambda_used: float

    @property
    def pi(self) -> np.ndarray:
        return np.array(
            [self.pi_search, self.pi_search_blocked,
             self.pi_transport, self.pi_transport_blocked]
        )

    def __post_init__(self):
        p = self.pi
        if np.any(p < -_GENERATOR_TOL) or np.any(p > 1 + _GENERATOR_TOL):
            raise InvalidInputError("occupancies must lie in [0, 1]")
        if abs(p.sum() - 1.0) > 1e-9:
            raise InvalidInputError(f"occupancies must sum to 1, got {p.sum()}")


def build_generator(config: CtmcConfig, lam: float) -> GeneratorMatrix:
    """Transition-rate matrix of the behavioral chain at robot density lam."""
    if lam < 0:
        raise InvalidInputError(f"density must be >= 0, got {lam}")
    p = config.params
    omega_p, omega_d = task_rates(p)
    omega_c = encounter_rate(p, lam)
    q = np.zeros((4, 4))
    q[SEARCH, TRANSPORT] = omega_p
    q[SEARCH, SEARCH_BLOCKED] = omega_c
    q[TRANSPORT, SEARCH] = omega_d            # a delivery
    q[TRANSPORT, TRANSPORT_BLOCKED] = omega_c
    q[SEARCH_BLOCKED, SEARCH] = p.rho
    q[TRANSPORT_BLOCKED, TRANSPORT] = p.rho
    np.fill_diagonal(q, -q.sum(axis=1))
    return GeneratorMatrix(entries=q, lambda_used=lam)


def _solution_from_pi(pi: np.ndarray, omega_d: float, lam: float) -> CtmcSolution:
    return CtmcSolution(
        pi_search=float(pi[SEARCH]),
        pi_search_blocked=float(pi[SEARCH_BLOCKED]),
        pi_transport=float(pi[TRANSPORT]),
        pi_transport_blocked=float(pi[TRANSPORT_BLOCKED]),
        per_robot_delivery_rate=float(omega_d * pi[TRANSPORT]),
        lambda_used=lam,
    )


def steady_state(gen: GeneratorMatrix) -> CtmcSolution:
    """Solve pi Q = 0, sum(pi) = 1 numerically.

    The normalization replaces the last column of Q^T; the closed form in
    closed_form_steady_state is the independent cross-check.
    """
    q = np.asarray(gen.entries, dtype=float)
    a = q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(4)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"singular or reducible generator: {exc}") from exc
    residual = float(np.max(np.abs(pi @ q)))
    if residual > 1e-9 or np.any(pi < -1e-9):
        raise NumericalFailureError(
            f"steady-state solve failed: residual={residual}, pi={pi}"
        )
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    omega_d = float(q[TRANSPORT, SEARCH])
    return _solution_from_pi(pi, omega_d, gen.lambda_used)


def closed_form_steady_state(config: CtmcConfig, lam: float) -> CtmcSolution:
    """Closed-form steady state for the 4-state chain (cross-check path)."""
    p = config.params
    omega_p, omega_d = task_rates(p)
    omega_c = encounter_rate(p, lam)
    a = 1.0 / omega_p + 1.0 / omega_d
    blocked_ratio = omega_c / p.rho
    k = 1.0 / (a * (1.0 + blocked_ratio))
    pi = np.array([
        k / omega_p,
        blocked_ratio * k / omega_p,
        k / omega_d,
        blocked_ratio * k / omega_d,
    ])
    return _solution_from_pi(pi, omega_d, lam)


def cycle_time_constant(config: CtmcConfig) -> float:
    """A = 1/omega_p + 1/omega_d, the unblocked task-cycle time."""
    omega_p, omega_d = task_rates(config.params)
    return 1.0 / omega_p + 1.0 / omega_d


def swarm_throughput(config: CtmcConfig, lam: float) -> float:
    """Deliveries per area per time at density lam: lam * rho / (A*(rho + c*lam))."""
    if lam < 0:
        raise InvalidInputError(f"density must be >= 0, got {lam}")
    p = config.params
    a = cycle_time_constant(config)
    c = sweep_coefficient(p)
    return lam * p.rho / (a * (p.rho + c * lam))


def throughput_asymptote(config: CtmcConfig) -> float:
    """Horizontal asymptote of the throughput curve: rho / (c*A)."""
    return config.params.rho / (sweep_coefficient(config.params) * cycle_time_constant(config))


def objective(config: CtmcConfig, lam: float) -> float:
    """Net deployment objective J(lambda) = Q(lambda) - C*lambda."""
    return swarm_throughput(config, lam) - config.cost_c * lam


def closed_form_optimal_density(config: CtmcConfig) -> float:
    """lambda_star = max(0, (rho/c)*(1/sqrt(A*C) - 1)); requires C > 0."""
    if config.cost_c == 0.0:
        raise UnboundedObjectiveError(
            "zero deployment cost: throughput is monotone, no interior maximum"
        )
    a = cycle_time_constant(config)
    c = sweep_coefficient(config.params)
    return max(0.0, (config.params.rho / c) * (1.0 / math.sqrt(a * config.cost_c) - 1.0))


def _golden_section_max(f, lo: float, hi: float, rel_tol: float = 1e-8) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    scale = max(abs(lo), abs(hi), 1.0)
    while hi - lo > rel_tol * scale:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OptimalDensity:
    value: float
    objective_value: float
    degenerate: bool   # True when the cost is so high the optimum is zero robots

    def report(self) -> str:
        if self.degenerate:
            return "optimal density is 0 (degenerate: deployment cost exceeds marginal throughput)"
        return f"optimal density {self.value:.6g} with objective {self.objective_value:.6g}"


def optimal_density(
    config: CtmcConfig, grid_points: int = 10_000
) -> OptimalDensity:
    """Maximize J(lambda) over lambda >= 0 by coarse grid + golden-section refinement.

    Raises UnboundedObjectiveError when C = 0 (throughput alone is monotone
    increasing, so no interior maximum exists).
    """
    if config.cost_c == 0.0:
        raise UnboundedObjectiveError(
            "zero deployment cost: throughput is monotone, no interior maximum"
        )
    c = sweep_coefficient(config.params)
    hi = 10.0 * config.params.rho / c
    grid = np.linspace(0.0, hi, grid_points)
    values = np.array([objective(config, x) for x in grid])
    i = int(np.argmax(values))
    lo_b = grid[max(i - 1, 0)]
    hi_b = grid[min(i + 1, grid_points - 1)]
    lam_star = _golden_section_max(lambda x: objective(config, x), lo_b, hi_b)
    # Golden section localizes a flat maximum only to ~sqrt(eps); polish by
    # driving the objective's slope to zero where a sign change brackets it.
    a = cycle_time_constant(config)
    rho = config.params.rho

    def slope(x: float) -> float:
        return rho * rho / (a * (rho + c * x) ** 2) - config.cost_c

    if slope(0.0) > 0.0:
        s_hi = hi
        while slope(s_hi) > 0.0:
            s_hi *= 2.0
        lam_star = float(brentq(slope, 0.0, s_hi, xtol=1e-12, rtol=1e-12))
    if objective(config, 0.0) >= objective(config, lam_star):
        lam_star = 0.0
    degenerate = lam_star <= 1e-9
    if degenerate:
        lam_star = 0.0
    return OptimalDensity(
        value=lam_star,
        objective_value=objective(config, lam_star),
        degenerate=degenerate,
    )


def monte_carlo_occupancy(
    config: CtmcConfig,
    lam: float,
    horizon: float,
    rng: np.random.Generator,
) -> CtmcSolution:
    """Time-averaged occupancies from a jump-process simulation of the chain.

    Independent oracle for steady_state: exponential holding times with
    competing transition rates, run to the given horizon.
    """
    if horizon <= 0:
        raise InvalidInputError(f"horizon must be > 0, got {horizon}")
    q = build_generator(config, lam).entries
    omega_d = float(q[TRANSPORT, SEARCH])
    dwell = np.zeros(4)
    state = SEARCH
    t = 0.0
    while t < horizon:
        total = -q[state, state]
        if total <= 0.0:   # absorbing (only if lam = 0 degenerates the chain)
            dwell[state] += horizon - t
            break
        hold = rng.exponential(1.0 / total)
        hold = min(hold, horizon - t)
        dwell[state] += hold
        t += hold
        if t >= horizon:
            break
        rates_out = q[state].copy()
        rates_out[state] = 0.0
        state = int(rng.choice(4, p=rates_out / total))
    pi = dwell / dwell.sum()
    return _solution_from_pi(pi, omega_d, lam)
