"""Per-robot sliding-window encounter counting and MLE density estimation.

Each robot keeps an EncounterWindow: the time stamps of new-encounter onsets
within the last L time units. An onset is registered for every unit of
strict increase in the robot's concurrent-partner count, so two partners
appearing in the same tick count as two encounters. The windowed count y
yields the density estimate  lambda_hat = y / (4*delta*(4/pi)*v*L).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InvalidInputError, NotReadyError
from .rates import SwarmParams, sweep_coefficient


@dataclass(frozen=True)
class DensityEstimate:
    value: float          # estimated robot density (per area)
    sample_count: int     # windowed encounter count used
    at_time: float

    def __post_init__(self):
        if self.value < 0:
            raise InvalidInputError("estimate must be >= 0")
        if (self.sample_count == 0) != (self.value == 0.0):
            raise InvalidInputError("estimate is zero iff the windowed count is zero")


class EncounterWindow:
    """Onset time stamps within the measurement horizon L.

    Mutated only through record_partner_count; stamps older than t - L are
    pruned as time advances, so memory stays at the expected omega_c * L
    stamps.
    """

    def __init__(self, horizon_l: float):
        if horizon_l <= 0:
            raise InvalidInputError(f"horizon L must be > 0, got {horizon_l}")
        self.horizon_l = float(horizon_l)
        self.start_times: deque[float] = deque()
        self.current_partners = 0
        self._last_time = -float("inf")

    def record_partner_count(self, t: float, partners: int) -> "EncounterWindow":
        """Update with the current concurrent-partner count at time t.

        Every unit of strict increase over the previous count registers one
        onset at t; decreases register nothing.
        """
        if t < self._last_time:
            raise InvalidInputError(
                f"time went backwards: {t} < {self._last_time}"
            )
        if partners < 0:
            raise InvalidInputError("partner count must be >= 0")
        self._last_time = t
        new = partners - self.current_partners
        for _ in range(max(0, new)):
            self.start_times.append(t)
        self.current_partners = partners
        self._prune(t)
        return self

    def _prune(self, t: float) -> None:
        cutoff = t - self.horizon_l
        stamps = self.start_times
        while stamps and stamps[0] < cutoff:
            stamps.popleft()

    def windowed_count(self, t: float) -> int:
        """Number of onsets in the closed interval [t - L, t]."""
        if t < self.horizon_l:
            raise NotReadyError(
                f"window not ready: t={t} < L={self.horizon_l}"
            )
        if t < self._last_time:
            raise InvalidInputError(f"time went backwards: {t} < {self._last_time}")
        self._last_time = max(self._last_time, t)
        self._prune(t)
        return sum(1 for s in self.start_times if s <= t)


def mle_density(
    y: int, params: SwarmParams, horizon_l: float, at_time: float = 0.0
) -> DensityEstimate:
    """Maximum-likelihood swarm density from a windowed encounter count."""
    if horizon_l <= 0:
        raise InvalidInputError(f"horizon L must be > 0, got {horizon_l}")
    if y < 0:
        raise InvalidInputError("count must be >= 0")
    value = y / (sweep_coefficient(params) * horizon_l)
    return DensityEstimate(value=value, sample_count=y, at_time=at_time)
