"""Time-stepped 2D simulation of the distributed collection task.

Robots perform a run-and-turn random walk (straight runs at speed v,
headings redrawn at Poisson-timed instants, specular wall reflection),
pick up objects within delta of pick-up sites and deliver them within
delta of drop-off sites. Two robots within 2*delta of each other enter an
encounter and resolve it with a randomized-backoff avoidance maneuver:
each suspends task work and keeps wandering at speed v until an
exponentially distributed backoff (rate rho/2 per robot) expires; the
pair's encounter resolves at the earlier of the two backoffs, so
resolution times are exponential with rate ~rho. A resolved pair stays
refractory ("cooling") until its separation exceeds a re-arm radius of
2*delta*(1 + hysteresis), which decorrelates successive encounters of the
same pair. Every robot keeps moving at speed v throughout, which is what
preserves the mean-field encounter rate.

New robots enter through the boundary as a Poisson process with rate
lambda_in * area. With a controller configured, each robot runs the
sliding-window density estimator and the retreat coin flip every decision
period; a retreating robot drives straight to the nearest wall (still
causing encounters on the way) and is removed on contact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .controller import Action, ControllerConfig, decide
from .errors import InvalidInputError
from .estimator import EncounterWindow, mle_density
from .grid import UniformGrid2D
from .rates import SwarmParams

# Event kinds.
ENCOUNTER_START = "EncounterStart"
ENCOUNTER_END = "EncounterEnd"
PICKUP = "Pickup"
DROPOFF = "Dropoff"
ENTRY = "Entry"
RETREAT = "Retreat"

MODE_SEARCHING = "Searching"
MODE_CARRYING = "Carrying"


@dataclass(frozen=True, slots=True)
class SimEvent:
    time: float
    kind: str
    robot_id: int
    partner_id: int | None = None


@dataclass(frozen=True)
class SimConfig:
    params: SwarmParams
    width: float
    height: float
    initial_robot_count: int
    seed: int
    tick_dt: float
    total_time: float
    controller: ControllerConfig | None = None
    estimator_l: float | None = None
    hysteresis: float = 1.0       # pair re-arms once separation > 2*delta*(1 + hysteresis)
    metrics_every: int = 1        # record the metrics series every this many ticks

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidInputError(
                f"domain must have positive area, got {self.width} x {self.height}"
            )
        if self.initial_robot_count < 0:
            raise InvalidInputError("initial_robot_count must be >= 0")
        if self.tick_dt <= 0 or self.total_time < 0:
            raise InvalidInputError("tick_dt must be > 0 and total_time >= 0")
        bound = self.params.delta / (4.0 * self.params.v)
        if self.tick_dt > bound + 1e-12:
            raise InvalidInputError(
                f"tick_dt={self.tick_dt} exceeds the tunneling bound "
                f"delta/(4v)={bound:.6g}"
            )
        if self.estimator_l is not None and self.estimator_l <= 0:
            raise InvalidInputError("estimator_l must be > 0 when set")
        if self.controller is not None and self.estimator_l is None:
            raise InvalidInputError("a controller requires estimator_l")
        if self.hysteresis < 0:
            raise InvalidInputError("hysteresis must be >= 0")
        if self.metrics_every < 1:
            raise InvalidInputError("metrics_every must be >= 1")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass
class Robot:
    """Read-only snapshot of one robot's state."""

    id: int
    position: np.ndarray
    heading: float
    mode: str
    partners: frozenset[int]
    retreating: bool
    entry_time: float


@dataclass
class MetricsSeries:
    t: list[float] = field(default_factory=list)
    n_robots: list[int] = field(default_factory=list)
    lambda_true: list[float] = field(default_factory=list)
    lambda_hat_mean: list[float] = field(default_factory=list)
    dropoffs_cum: list[int] = field(default_factory=list)
    n_avoiding: list[int] = field(default_factory=list)

    HEADER = "t,n_robots,lambda_true,lambda_hat_mean,dropoffs_cum,n_avoiding"

    def rows(self):
        for i in range(len(self.t)):
            yield (
                self.t[i], self.n_robots[i], self.lambda_true[i],
                self.lambda_hat_mean[i], self.dropoffs_cum[i], self.n_avoiding[i],
            )


class World:
    """Mutable simulation state; advance with step()."""

    def __init__(self, config: SimConfig):
        self.config = config
        p = config.params
        self.rng = np.random.default_rng(config.seed)
        self.time = 0.0
        self.event_log: list[SimEvent] = []
        self.anomaly_count = 0   # body overlaps (separation < 2r), logged not fatal
        self.dropoffs_cum = 0

        # Heading redraw rate for the run-and-turn walk: one turn per
        # quarter domain diagonal of travel.
        diag = math.hypot(config.width, config.height)
        self.turn_rate = 4.0 * p.v / diag

        # Static task sites: spatial Poisson processes over the domain.
        self.pickup_sites = self._scatter_sites(p.lambda_p)
        self.dropoff_sites = self._scatter_sites(p.lambda_d)
        self._pickup_tree = cKDTree(self.pickup_sites) if len(self.pickup_sites) else None
        self._dropoff_tree = cKDTree(self.dropoff_sites) if len(self.dropoff_sites) else None

        # Robot state, index-aligned arrays. ids are stable; indices shift
        # on removal via _id_to_index.
        n = config.initial_robot_count
        self.pos = np.column_stack([
            self.rng.random(n) * config.width,
            self.rng.random(n) * config.height,
        ]) if n else np.empty((0, 2))
        self.heading = self.rng.uniform(0.0, 2.0 * math.pi, n)
        self.carrying = np.zeros(n, dtype=bool)
        self.retreating = np.zeros(n, dtype=bool)
        self.entry_time = np.zeros(n)
        self.backoff_time = np.full(n, np.inf)  # avoidance backoff expiry; inf = not avoiding
        self.lambda_hat = np.full(n, np.nan)    # cached estimate; nan = not ready
        # Site a robot last interacted with stays off limits until the
        # robot moves past the re-arm radius; otherwise it retriggers on
        # the way out of the contact disk. -1 = none pending.
        self.refr_pickup = np.full(n, -1, dtype=np.int64)
        self.refr_dropoff = np.full(n, -1, dtype=np.int64)
        self.ids = np.arange(n, dtype=np.int64)
        self._next_id = n
        self._id_to_index = {int(i): int(i) for i in range(n)}

        self.partners: dict[int, set[int]] = {int(i): set() for i in self.ids}
        self.windows: dict[int, EncounterWindow] = {}
        if config.estimator_l is not None:
            self.windows = {
                int(i): EncounterWindow(config.estimator_l) for i in self.ids
            }
        # Active encounters: sorted id pair -> resolution deadline (the
        # earlier of the two members' backoff expiries). Resolved pairs sit
        # in the cooling set until their separation exceeds the re-arm
        # radius, so the same pair cannot immediately re-trigger.
        self.active_pairs: dict[tuple[int, int], float] = {}
        self.cooling_pairs: set[tuple[int, int]] = set()

        if config.controller is not None:
            self._next_decision = config.controller.dt
        else:
            self._next_decision = math.inf

    # -- construction helpers ------------------------------------------------

    def _scatter_sites(self, intensity: float) -> np.ndarray:
        n = self.rng.poisson(intensity * self.config.area)
        return np.column_stack([
            self.rng.random(n) * self.config.width,
            self.rng.random(n) * self.config.height,
        ]) if n else np.empty((0, 2))

    def _site_hits(
        self,
        cand: np.ndarray,
        tree: cKDTree,
        sites: np.ndarray,
        refr: np.ndarray,
    ) -> list[int]:
        """Robot indices in contact with an eligible site this tick.

        The chosen site becomes refractory for that robot until the robot
        has moved past the re-arm radius, so a single contact cannot fire
        repeatedly while the robot crosses the contact disk or doubles
        back onto the site it just used.
        """
        if cand.size == 0 or len(sites) == 0:
            return []
        p = self.config.params
        rearm_sq = (2.0 * p.delta * (1.0 + self.config.hysteresis)) ** 2
        k = min(4, len(sites))
        d, idx = tree.query(self.pos[cand], k=k)
        d = np.asarray(d).reshape(cand.size, k)
        idx = np.asarray(idx).reshape(cand.size, k)
        hits: list[int] = []
        for row in np.nonzero(d[:, 0] <= p.delta)[0]:
            i = cand[row]
            if refr[i] >= 0:
                off = self.pos[i] - sites[refr[i]]
                if off[0] * off[0] + off[1] * off[1] > rearm_sq:
                    refr[i] = -1
            for col in range(k):
                if d[row, col] > p.delta:
                    break
                s = int(idx[row, col])
                if s != refr[i]:
                    refr[i] = s
                    hits.append(int(i))
                    break
        return hits

    # -- public views ---------------------------------------------------------

    @property
    def n_robots(self) -> int:
        return len(self.ids)

    @property
    def lambda_true(self) -> float:
        return self.n_robots / self.config.area

    @property
    def robots(self) -> list[Robot]:
        return [
            Robot(
                id=int(self.ids[i]),
                position=self.pos[i].copy(),
                heading=float(self.heading[i]),
                mode=MODE_CARRYING if self.carrying[i] else MODE_SEARCHING,
                partners=frozenset(self.partners[int(self.ids[i])]),
                retreating=bool(self.retreating[i]),
                entry_time=float(self.entry_time[i]),
            )
            for i in range(self.n_robots)
        ]

    # -- event helpers ----------------------------------------------------

    def _log(self, kind: str, robot_id: int, partner_id: int | None = None) -> None:
        self.event_log.append(SimEvent(self.time, kind, robot_id, partner_id))

    def _record_partner_change(self, rid: int) -> None:
        win = self.windows.get(rid)
        if win is not None:
            win.record_partner_count(self.time, len(self.partners[rid]))

    def _start_encounter(self, id_a: int, id_b: int) -> None:
        p = self.config.params
        t = self.time
        for rid in (id_a, id_b):
            idx = self._id_to_index[rid]
            if not self.partners[rid] or self.backoff_time[idx] <= t:
                # Backoff at rate rho/2 per robot, so a fresh pair's first
                # expiry fires at rate rho; the exponential is memoryless,
                # so reusing a running backoff for an overlapping encounter
                # leaves the marginal resolution-time distribution intact.
                # A backoff that already fired this tick is stale (its own
                # pair resolves later in the step) and must be redrawn so
                # the new pair cannot end before it starts.
                self.backoff_time[idx] = t - math.log1p(-self.rng.random()) / (p.rho / 2.0)
        idx_a, idx_b = self._id_to_index[id_a], self._id_to_index[id_b]
        deadline = min(self.backoff_time[idx_a], self.backoff_time[idx_b])
        self.partners[id_a].add(id_b)
        self.partners[id_b].add(id_a)
        self.active_pairs[(id_a, id_b)] = deadline
        self._log(ENCOUNTER_START, id_a, id_b)
        self._log(ENCOUNTER_START, id_b, id_a)
        self._record_partner_change(id_a)
        self._record_partner_change(id_b)

    def _end_encounter(self, id_a: int, id_b: int, t_end: float, cool: bool = True) -> None:
        """Resolve a pair at t_end (the backoff deadline, not the tick edge)."""
        del self.active_pairs[(id_a, id_b)]
        if cool:
            self.cooling_pairs.add((id_a, id_b))
        self.partners[id_a].discard(id_b)
        self.partners[id_b].discard(id_a)
        self.event_log.append(SimEvent(t_end, ENCOUNTER_END, id_a, id_b))
        self.event_log.append(SimEvent(t_end, ENCOUNTER_END, id_b, id_a))
        for rid in (id_a, id_b):
            self._record_partner_change(rid)
            if not self.partners[rid]:
                idx = self._id_to_index.get(rid)
                if idx is not None:
                    self.backoff_time[idx] = np.inf

    # -- tick ---------------------------------------------------------------

    def step(self, tick_dt: float | None = None) -> None:
        """Advance one tick: motion, encounters, avoidance, tasks, influx, control."""
        dt = self.config.tick_dt if tick_dt is None else tick_dt
        cfg = self.config
        p = cfg.params
        n = self.n_robots
        t_new = self.time + dt

        # (1) Motion: everyone wanders at speed v (avoidance suspends tasks,
        # not motion); retreating robots hold their exit heading.
        if n:
            redraw = ~self.retreating & (self.rng.random(n) < self.turn_rate * dt)
            if redraw.any():
                self.heading[redraw] = self.rng.uniform(0.0, 2.0 * math.pi, int(redraw.sum()))
            step_len = p.v * dt
            self.pos[:, 0] += step_len * np.cos(self.heading)
            self.pos[:, 1] += step_len * np.sin(self.heading)

            # Retreating robots are removed on boundary contact; everyone
            # else reflects specularly.
            out = (
                (self.pos[:, 0] < 0.0) | (self.pos[:, 0] > cfg.width)
                | (self.pos[:, 1] < 0.0) | (self.pos[:, 1] > cfg.height)
            )
            removed = out & self.retreating
            reflect = out & ~self.retreating
            if reflect.any():
                x, y = self.pos[:, 0], self.pos[:, 1]
                lo = reflect & (x < 0.0)
                hi = reflect & (x > cfg.width)
                x[lo] = -x[lo]
                x[hi] = 2.0 * cfg.width - x[hi]
                self.heading[lo | hi] = math.pi - self.heading[lo | hi]
                lo = reflect & (y < 0.0)
                hi = reflect & (y > cfg.height)
                y[lo] = -y[lo]
                y[hi] = 2.0 * cfg.height - y[hi]
                self.heading[lo | hi] = -self.heading[lo | hi]

        self.time = t_new

        if n and removed.any():
            self._remove_robots([int(self.ids[i]) for i in np.nonzero(removed)[0]])
            n = self.n_robots

        # (2) Encounter detection. Cooling pairs re-arm once separated past
        # the re-arm radius; active and cooling pairs cannot re-trigger.
        if self.cooling_pairs:
            rearm2 = (2.0 * p.delta * (1.0 + cfg.hysteresis)) ** 2
            rearmed = []
            for id_a, id_b in self.cooling_pairs:
                ia = self._id_to_index.get(id_a)
                ib = self._id_to_index.get(id_b)
                if ia is None or ib is None:
                    rearmed.append((id_a, id_b))
                    continue
                d2 = (self.pos[ia, 0] - self.pos[ib, 0]) ** 2 + (self.pos[ia, 1] - self.pos[ib, 1]) ** 2
                if d2 > rearm2:
                    rearmed.append((id_a, id_b))
            self.cooling_pairs.difference_update(rearmed)

        if n >= 2:
            body2 = (2.0 * p.r) ** 2
            tree = cKDTree(self.pos)
            for i, j in sorted(tree.query_pairs(2.0 * p.delta)):
                id_a, id_b = int(self.ids[i]), int(self.ids[j])
                if id_a > id_b:
                    id_a, id_b = id_b, id_a
                d2 = (self.pos[i, 0] - self.pos[j, 0]) ** 2 + (self.pos[i, 1] - self.pos[j, 1]) ** 2
                if d2 < body2:
                    self.anomaly_count += 1   # body overlap, logged not fatal
                pair = (id_a, id_b)
                if pair not in self.active_pairs and pair not in self.cooling_pairs:
                    self._start_encounter(id_a, id_b)

        # (3) Avoidance resolution: a pair resolves at its backoff deadline
        # (the end event carries the exact deadline time, not the tick edge).
        if self.active_pairs:
            ended = [
                (pair, deadline)
                for pair, deadline in self.active_pairs.items()
                if self.time >= deadline
            ]
            for (id_a, id_b), deadline in ended:
                self._end_encounter(id_a, id_b, deadline)

        # (4) Tasks: suspended while avoiding or retreating. Mode is
        # snapshotted so a pickup cannot chain into a same-tick dropoff.
        if n:
            free = np.array(
                [not self.partners[int(r)] for r in self.ids], dtype=bool
            ) & ~self.retreating
            was_carrying = self.carrying.copy()
            if self._pickup_tree is not None:
                cand = np.nonzero(free & ~was_carrying)[0]
                for i in self._site_hits(cand, self._pickup_tree,
                                          self.pickup_sites, self.refr_pickup):
                    self.carrying[i] = True
                    self._log(PICKUP, int(self.ids[i]))
            if self._dropoff_tree is not None:
                cand = np.nonzero(free & was_carrying)[0]
                for i in self._site_hits(cand, self._dropoff_tree,
                                          self.dropoff_sites, self.refr_dropoff):
                    self.carrying[i] = False
                    self.dropoffs_cum += 1
                    self._log(DROPOFF, int(self.ids[i]))

        # (5) Influx through the boundary.
        n_new = self.rng.poisson(p.lambda_in * cfg.area * dt)
        for _ in range(n_new):
            self._spawn_entrant()

        # (6) Control.
        if self.config.controller is not None and self.time >= self._next_decision:
            self._run_decisions()
            self._next_decision += self.config.controller.dt

    def _remove_robots(self, rids: list[int]) -> None:
        for rid in rids:
            for pid in sorted(self.partners[rid]):
                pair = (rid, pid) if rid < pid else (pid, rid)
                if pair in self.active_pairs:
                    self._end_encounter(pair[0], pair[1], self.time, cool=False)
            self._log(RETREAT, rid)
        keep = np.array([int(r) not in rids for r in self.ids], dtype=bool)
        rid_set = set(rids)
        self.pos = self.pos[keep]
        self.heading = self.heading[keep]
        self.carrying = self.carrying[keep]
        self.retreating = self.retreating[keep]
        self.entry_time = self.entry_time[keep]
        self.backoff_time = self.backoff_time[keep]
        self.lambda_hat = self.lambda_hat[keep]
        self.refr_pickup = self.refr_pickup[keep]
        self.refr_dropoff = self.refr_dropoff[keep]
        self.ids = self.ids[keep]
        for rid in rid_set:
            self.partners.pop(rid, None)
            self.windows.pop(rid, None)
        self._id_to_index = {int(r): i for i, r in enumerate(self.ids)}

    def _spawn_entrant(self) -> None:
        cfg = self.config
        w, h = cfg.width, cfg.height
        u = self.rng.random() * 2.0 * (w + h)
        if u < w:
            pos, normal = (u, 0.0), math.pi / 2.0
        elif u < w + h:
            pos, normal = (w, u - w), math.pi
        elif u < 2.0 * w + h:
            pos, normal = (u - w - h, h), -math.pi / 2.0
        else:
            pos, normal = (0.0, u - 2.0 * w - h), 0.0
        heading = normal + self.rng.uniform(-math.pi / 2.0, math.pi / 2.0)
        rid = self._next_id
        self._next_id += 1
        self.pos = np.vstack([self.pos, np.asarray(pos)])
        self.heading = np.append(self.heading, heading)
        self.carrying = np.append(self.carrying, False)
        self.retreating = np.append(self.retreating, False)
        self.entry_time = np.append(self.entry_time, self.time)
        self.backoff_time = np.append(self.backoff_time, np.inf)
        self.lambda_hat = np.append(self.lambda_hat, np.nan)
        self.refr_pickup = np.append(self.refr_pickup, -1)
        self.refr_dropoff = np.append(self.refr_dropoff, -1)
        self.ids = np.append(self.ids, rid)
        self._id_to_index[rid] = len(self.ids) - 1
        self.partners[rid] = set()
        if cfg.estimator_l is not None:
            self.windows[rid] = EncounterWindow(cfg.estimator_l)
        self._log(ENTRY, rid)

    def _run_decisions(self) -> None:
        cfg = self.config
        ctrl = cfg.controller
        horizon = cfg.estimator_l
        t = self.time
        to_retreat = []
        for i in range(self.n_robots):
            if self.retreating[i]:
                continue
            rid = int(self.ids[i])
            # Algorithm guard: each robot waits a full window after entry.
            if t < horizon or t - self.entry_time[i] < horizon:
                self.lambda_hat[i] = np.nan
                continue
            y = self.windows[rid].windowed_count(t)
            est = mle_density(y, cfg.params, horizon, at_time=t)
            self.lambda_hat[i] = est.value
            decision = decide(ctrl, est, self.rng)
            if decision.action is Action.RETREAT:
                to_retreat.append(i)
        for i in to_retreat:
            self.retreating[i] = True
            self.heading[i] = self._exit_heading(self.pos[i])

    def _exit_heading(self, pos: np.ndarray) -> float:
        """Heading along the shortest path to the boundary."""
        cfg = self.config
        options = (
            (pos[0], math.pi),                    # left wall
            (cfg.width - pos[0], 0.0),            # right wall
            (pos[1], -math.pi / 2.0),             # bottom wall
            (cfg.height - pos[1], math.pi / 2.0), # top wall
        )
        return min(options)[1]

    def mean_lambda_hat(self) -> float:
        """Population mean of the cached density estimates (nan if none ready)."""
        present = self.lambda_hat[~self.retreating] if self.n_robots else np.array([])
        ready = present[~np.isnan(present)]
        return float(ready.mean()) if ready.size else float("nan")


def init_world(config: SimConfig) -> World:
    return World(config)


def step(world: World, tick_dt: float | None = None) -> World:
    world.step(tick_dt)
    return world


@dataclass
class SimResult:
    events: list[SimEvent]
    metrics: MetricsSeries
    world: World


def run(config: SimConfig) -> SimResult:
    """Run to total_time, collecting the event log and the metrics series."""
    world = init_world(config)
    metrics = MetricsSeries()

    def snapshot():
        metrics.t.append(world.time)
        metrics.n_robots.append(world.n_robots)
        metrics.lambda_true.append(world.lambda_true)
        metrics.lambda_hat_mean.append(world.mean_lambda_hat())
        metrics.dropoffs_cum.append(world.dropoffs_cum)
        metrics.n_avoiding.append(
            sum(1 for s in world.partners.values() if s)
        )

    snapshot()
    n_ticks = int(round(config.total_time / config.tick_dt))
    for k in range(1, n_ticks + 1):
        world.step()
        if k % config.metrics_every == 0 or k == n_ticks:
            snapshot()
    return SimResult(events=world.event_log, metrics=metrics, world=world)


def neighbor_query(world: World, position, radius: float) -> set[int]:
    """Robot ids within radius of position, via the uniform-grid index."""
    if world.n_robots == 0:
        return set()
    grid = UniformGrid2D(cell_size=max(radius, 2.0 * world.config.params.delta))
    grid.build(world.pos)
    return {int(world.ids[i]) for i in grid.query(position, radius)}


def brute_force_neighbors(world: World, position, radius: float) -> set[int]:
    """All-pairs oracle for neighbor_query."""
    if world.n_robots == 0:
        return set()
    d2 = ((world.pos - np.asarray(position, dtype=float)) ** 2).sum(axis=1)
    return {int(world.ids[i]) for i in np.nonzero(d2 <= radius * radius)[0]}
