"""One-sided proportional retreat law and the ensemble closed-loop ODE.

The retreat rate epsilon(lambda) is zero at or below the set point
lambda_star and (lambda_in + K_p*(lambda - lambda_star))/lambda above it,
which feedback-linearizes the population dynamics
lambda_dot = lambda_in - epsilon*lambda into a proportional loop. Each robot
applies it as a Bernoulli leave-probability min(1, epsilon*dt) per decision
period.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .estimator import DensityEstimate

# Surface tolerance for deciding we are sitting exactly on the set point.
_SURFACE_EPS = 1e-12


class Action(Enum):
    STAY = "stay"
    RETREAT = "retreat"


@dataclass(frozen=True)
class ControllerConfig:
    lambda_star: float   # density set point
    k_p: float           # proportional gain (per time)
    dt: float            # decision period
    lambda_in: float     # robot influx rate (per area per time)

    def __post_init__(self):
        if self.lambda_star < 0:
            raise InvalidInputError(f"lambda_star must be >= 0, got {self.lambda_star}")
        if self.k_p <= 0:
            raise InvalidInputError(f"k_p must be > 0, got {self.k_p}")
        if self.dt <= 0:
            raise InvalidInputError(f"dt must be > 0, got {self.dt}")
        if self.lambda_in < 0:
            raise InvalidInputError(f"lambda_in must be >= 0, got {self.lambda_in}")


@dataclass(frozen=True)
class RetreatDecision:
    action: Action
    epsilon_used: float
    estimate_used: float
    ready: bool = True   # False when the decision abstained on a missing estimate

    def __post_init__(self):
        if self.epsilon_used == 0.0 and self.action is not Action.STAY:
            raise InvalidInputError("zero epsilon must decide Stay")


def epsilon(config: ControllerConfig, lambda_hat: float) -> float:
    """Leave-probability rate for a density estimate. Zero at or below the set point."""
    if lambda_hat < 0:
        raise InvalidInputError(f"density estimate must be >= 0, got {lambda_hat}")
    if lambda_hat <= config.lambda_star:
        return 0.0
    return (config.lambda_in + config.k_p * (lambda_hat - config.lambda_star)) / lambda_hat


def retreat_probability(config: ControllerConfig, lambda_hat: float) -> float:
    """Per-decision-period leave probability, clamped to [0, 1]."""
    return min(1.0, epsilon(config, lambda_hat) * config.dt)


def decide(
    config: ControllerConfig,
    estimate: DensityEstimate | None,
    rng: np.random.Generator,
) -> RetreatDecision:
    """Stay/Retreat coin flip for one robot at one decision instant.

    A missing (not yet ready) estimate abstains: Stay with epsilon 0,
    flagged via ready=False.
    """
    if estimate is None:
        return RetreatDecision(Action.STAY, 0.0, 0.0, ready=False)
    eps = epsilon(config, estimate.value)
    p = min(1.0, eps * config.dt)
    action = Action.RETREAT if (p > 0.0 and rng.random() < p) else Action.STAY
    return RetreatDecision(action, eps, estimate.value)


def _rk4(f, lam: float, h: float) -> float:
    k1 = f(lam)
    k2 = f(lam + 0.5 * h * k1)
    k3 = f(lam + 0.5 * h * k2)
    k4 = f(lam + h * k3)
    return lam + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ensemble_step(config: ControllerConfig, lam: float, dt: float) -> float:
    """Advance the ensemble closed-loop density by one step of length dt.

    Dynamics: lambda_dot = k_p*(lambda_star - lambda) above the set point,
    lambda_in at or below it. The vector field switches at lambda_star, so
    the step sub-steps to the crossing instead of integrating across it; on
    the surface itself the flow slides (influx pushes up, the proportional
    branch immediately pulls back down).
    """
    if lam < 0:
        raise InvalidInputError(f"density must be >= 0, got {lam}")
    if dt <= 0:
        raise InvalidInputError(f"dt must be > 0, got {dt}")
    ls = config.lambda_star
    remaining = dt
    while remaining > 0.0:
        if lam > ls + _SURFACE_EPS:
            # Proportional branch decays toward the set point and cannot
            # cross it; a single RK4 step covers the remainder.
            lam = _rk4(lambda x: config.k_p * (ls - x), lam, remaining)
            lam = max(lam, ls)
            remaining = 0.0
        elif lam < ls - _SURFACE_EPS:
            if config.lambda_in <= 0.0:
                break  # frozen below the set point with no influx
            t_cross = (ls - lam) / config.lambda_in
            if t_cross >= remaining:
                lam = _rk4(lambda x: config.lambda_in, lam, remaining)
                remaining = 0.0
            else:
                lam = ls
                remaining -= t_cross
        else:
            # Sliding mode at the switching surface.
            lam = ls
            remaining = 0.0
    return lam


def simulate_ensemble(
    config: ControllerConfig, lambda0: float, t_end: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the ensemble dynamics from lambda0; returns (times, densities)."""
    n = int(round(t_end / dt))
    ts = np.empty(n + 1)
    lams = np.empty(n + 1)
    ts[0], lams[0] = 0.0, lambda0
    lam = lambda0
    for i in range(1, n + 1):
        lam = ensemble_step(config, lam, dt)
        ts[i] = i * dt
        lams[i] = lam
    return ts, lams


def verify_feedback_linearization(config: ControllerConfig, lam: float) -> float:
    """Residual |(lambda_in - eps*lambda) - k_p*(lambda_star - lambda)| above the set point."""
    if lam <= config.lambda_star:
        raise InvalidInputError("identity only holds above the set point")
    eps = epsilon(config, lam)
    return abs((config.lambda_in - eps * lam) - config.k_p * (config.lambda_star - lam))
