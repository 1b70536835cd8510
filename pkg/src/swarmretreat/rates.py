"""Closed-form encounter/task rate models, exponential sampling and fitting.

All quantities are in dimensionless simulation units; densities are per unit
area. Two robots "encounter" each other when their separation drops to twice
the sensing half-width ``delta``; a moving robot sweeps a sensory strip of
width ``4*delta`` relative to other robots and ``2*delta`` over static task
sites, which is where the factor-of-two difference between the robot-robot
and robot-site rates below comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InvalidInputError


@dataclass(frozen=True)
class SwarmParams:
    """Physical and environmental constants of the swarm.

    r         -- robot body radius
    delta     -- sensing half-width (sensing skirt total diameter is 2*delta)
    v         -- average robot speed
    lambda_p  -- density of pick-up locations (per area)
    lambda_d  -- density of drop-off locations (per area)
    lambda_in -- robot influx rate (robots per area per time)
    rho       -- encounter-resolution rate
    """

    r: float
    delta: float
    v: float
    lambda_p: float
    lambda_d: float
    lambda_in: float
    rho: float

    def __post_init__(self):
        for name in ("delta", "v", "rho", "lambda_p", "lambda_d"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.lambda_in < 0:
            raise InvalidInputError(f"lambda_in must be >= 0, got {self.lambda_in}")
        if self.r < 0:
            raise InvalidInputError(f"r must be >= 0, got {self.r}")
        if self.r > self.delta:
            raise InvalidInputError(
                f"r must not exceed delta (body inside sensing skirt): r={self.r}, delta={self.delta}"
            )


@dataclass(frozen=True)
class Rates:
    """Derived rates at a particular robot density."""

    v_r: float       # average relative speed between robots
    omega_c: float   # robot-robot encounter rate at the given density
    omega_p: float   # pick-up location encounter rate
    omega_d: float   # drop-off location encounter rate

    def __post_init__(self):
        for name in ("v_r", "omega_c", "omega_p", "omega_d"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be >= 0")


def relative_speed(v: float) -> float:
    """Average relative speed between two robots moving at average speed v."""
    if v < 0:
        raise InvalidInputError(f"speed must be >= 0, got {v}")
    return 4.0 * v / math.pi


def sweep_coefficient(params: SwarmParams) -> float:
    """Sensory area swept per unit time relative to other robots: 4*delta*(4/pi)*v."""
    return 4.0 * params.delta * relative_speed(params.v)


def encounter_rate(params: SwarmParams, lam: float) -> float:
    """Expected robot-robot encounters per unit time at robot density lam."""
    if lam < 0:
        raise InvalidInputError(f"density must be >= 0, got {lam}")
    return sweep_coefficient(params) * lam


def task_rates(params: SwarmParams) -> tuple[float, float]:
    """(pick-up rate, drop-off rate): locations encountered per unit time."""
    omega_p = 2.0 * params.delta * params.v * params.lambda_p
    omega_d = 2.0 * params.delta * params.v * params.lambda_d
    return omega_p, omega_d


def all_rates(params: SwarmParams, lam: float) -> Rates:
    omega_p, omega_d = task_rates(params)
    return Rates(
        v_r=relative_speed(params.v),
        omega_c=encounter_rate(params, lam),
        omega_p=omega_p,
        omega_d=omega_d,
    )


def sample_exponential(rng: np.random.Generator, rate: float, size: int | None = None):
    """Draw from exp(rate) via the inverse-CDF transform.

    Returns a scalar when size is None, else an ndarray of shape (size,).
    The transform is applied explicitly (rather than rng.exponential) so the
    draw sequence is pinned to the generator's uniform stream.
    """
    if rate <= 0:
        raise InvalidInputError(f"rate must be > 0, got {rate}")
    if size is None:
        return -math.log1p(-rng.random()) / rate
    return -np.log1p(-rng.random(size)) / rate


def exponential_ks_distance(samples, rate: float) -> float:
    """Kolmogorov-Smirnov distance of samples against the exp(rate) CDF."""
    if rate <= 0:
        raise InvalidInputError(f"rate must be > 0, got {rate}")
    samples = np.asarray(samples, dtype=float)
    return float(stats.kstest(samples, "expon", args=(0.0, 1.0 / rate)).statistic)


def fit_exponential_rate(samples) -> tuple[float, float]:
    """MLE exponential rate for the samples, plus a goodness-of-fit statistic.

    Returns (rate, ks_distance) where rate = 1/mean and ks_distance is the
    KS distance of the samples against exp(rate). Thresholding is left to
    the caller.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise InvalidInputError("samples must be nonempty")
    if np.any(samples <= 0):
        raise InvalidInputError("all samples must be > 0")
    rate = 1.0 / float(samples.mean())
    return rate, exponential_ks_distance(samples, rate)
