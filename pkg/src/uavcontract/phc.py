"""Two-tier tabular policy hill climbing over the delivery game.

The GCS keeps one (Q, pi) pair per eligible type and learns what reward to
offer; each eligible UAV type keeps its own pair and learns what delivery
size to answer with.  Actions live on uniform grids; observations are the
opponent's most recent action, quantised to the same grids.

Within a slot the UAV moves first: it observes the bin of the previous
reward and delivers, then the GCS observes the bin of that delivery and
pays.  The UAV's learning update closes inside the slot; the GCS's update
waits for the next delivery, so its last pending update at the horizon is
dropped.  Both tiers share one update rule (Bellman step on Q, then a
greedy nudge of pi projected back onto the simplex), each with its own
rate, discount, and step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InsufficientData, ValidationError
from .game import Scenario, UavType, eligible_types


@dataclass(frozen=True)
class PhcParams:
    """Learning constants for both tiers plus the action-grid geometry.

    ``reward_levels`` / ``size_levels`` are the grid subdivision counts, so
    the grids hold levels + 1 points including both endpoints; zero levels
    collapses a grid to the single point 0.  ``r_max`` may be left None and
    resolved against a scenario with `with_default_r_max`.
    """

    learning_rate_gcs: float = 0.7
    learning_rate_uav: float = 0.7
    discount_gcs: float = 0.8
    discount_uav: float = 0.8
    step_gcs: float = 0.01
    step_uav: float = 0.01
    reward_levels: int = 20
    size_levels: int = 20
    r_max: float | None = None

    def __post_init__(self) -> None:
        for name in ("learning_rate_gcs", "learning_rate_uav"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValidationError(name, "must lie in (0, 1]")
        for name in ("discount_gcs", "discount_uav"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValidationError(name, "must lie in [0, 1)")
        for name in ("step_gcs", "step_uav"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValidationError(name, "must lie in (0, 1)")
        for name in ("reward_levels", "size_levels"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValidationError(name, "must be a non-negative integer")
        if self.r_max is not None and not self.r_max > 0.0:
            raise ValidationError("r_max", "must be positive when given")


def default_r_max(scenario: Scenario) -> float:
    """Reward-grid ceiling covering the highest feasible binding reward."""
    top_cost = max(ty.c for ty in scenario.types)
    return 2.0 * (top_cost * scenario.s_max + scenario.deployment_cost)


def with_default_r_max(params: PhcParams, scenario: Scenario) -> PhcParams:
    """Fill in r_max from the scenario when the caller left it open."""
    if params.r_max is not None:
        return params
    return replace(params, r_max=default_r_max(scenario))


def action_grids(params: PhcParams,
                 s_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Uniform reward and size grids, endpoints included."""
    if params.r_max is None:
        raise ValidationError("r_max", "unset; resolve with with_default_r_max")
    reward_grid = np.linspace(0.0, params.r_max, params.reward_levels + 1)
    size_grid = np.linspace(0.0, s_max, params.size_levels + 1)
    return reward_grid, size_grid


def quantize_state(value: float, grid: np.ndarray) -> int:
    """Index of the grid point nearest to value; exact midpoints round down."""
    step = float(grid[1] - grid[0]) if grid.shape[0] > 1 else 0.0
    return int(_kernels.nearest_bin(float(value), step, grid.shape[0]))


@dataclass
class PolicyTables:
    """One agent's state-action value table and mixed policy."""

    q: np.ndarray
    pi: np.ndarray

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=np.float64)
        self.pi = np.asarray(self.pi, dtype=np.float64)
        if self.q.ndim != 2 or self.q.shape != self.pi.shape:
            raise ValidationError("q", "q and pi must be equal-shape 2-D")
        self.check()

    @classmethod
    def cold(cls, n_states: int, n_actions: int) -> "PolicyTables":
        """Zero values, uniform policy."""
        return cls(q=np.zeros((n_states, n_actions)),
                   pi=np.full((n_states, n_actions), 1.0 / n_actions))

    def check(self) -> None:
        if not np.all(np.isfinite(self.q)):
            raise ValidationError("q", "values must be finite")
        if np.any(self.pi < 0.0) or np.any(self.pi > 1.0):
            raise ValidationError("pi", "entries must lie in [0, 1]")
        if np.any(np.abs(self.pi.sum(axis=1) - 1.0) > 1e-9):
            raise ValidationError("pi", "rows must sum to 1")

    def copy(self) -> "PolicyTables":
        return PolicyTables(q=self.q.copy(), pi=self.pi.copy())


def phc_update(tables: PolicyTables, state: int, action: int, payoff: float,
               next_state: int, rate: float, discount: float,
               step: float) -> PolicyTables:
    """Single in-place learning step; returns the same tables."""
    _kernels.phc_step(tables.q, tables.pi, state, action, float(payoff),
                      next_state, rate, discount, step)
    return tables


def select_action(tables: PolicyTables, state: int,
                  rng: np.random.Generator) -> int:
    """Sample an action index from the state's policy row."""
    return int(_kernels.sample_index(tables.pi[state], rng.random()))


@dataclass(frozen=True)
class EpisodeLog:
    """Per-slot trajectory for every learning type, plus the grids used.

    All arrays have shape (slots, types); column j belongs to the type whose
    1-based scenario index is ``type_indices[j]`` (descending-cost order).
    """

    type_indices: tuple[int, ...]
    reward_grid: np.ndarray
    size_grid: np.ndarray
    reward_index: np.ndarray
    size_index: np.ndarray
    gcs_state: np.ndarray
    uav_state: np.ndarray
    uav_utility: np.ndarray
    gcs_term: np.ndarray

    @property
    def slots(self) -> int:
        return self.reward_index.shape[0]

    @property
    def rewards(self) -> np.ndarray:
        """Offered reward values, shape (slots, types)."""
        return self.reward_grid[self.reward_index]

    @property
    def sizes(self) -> np.ndarray:
        """Delivered size values, shape (slots, types)."""
        return self.size_grid[self.size_index]

    def equals(self, other: "EpisodeLog") -> bool:
        """Bit-exact comparison of two logs."""
        return (self.type_indices == other.type_indices
                and np.array_equal(self.reward_grid, other.reward_grid)
                and np.array_equal(self.size_grid, other.size_grid)
                and np.array_equal(self.reward_index, other.reward_index)
                and np.array_equal(self.size_index, other.size_index)
                and np.array_equal(self.gcs_state, other.gcs_state)
                and np.array_equal(self.uav_state, other.uav_state)
                and np.array_equal(self.uav_utility, other.uav_utility)
                and np.array_equal(self.gcs_term, other.gcs_term))


@dataclass(frozen=True)
class TrainResult:
    """Trajectory log plus the final tables (one pair per learning type)."""

    log: EpisodeLog
    gcs_tables: tuple[PolicyTables, ...]
    uav_tables: tuple[PolicyTables, ...]


InitTables = tuple[Sequence[PolicyTables], Sequence[PolicyTables]]


def _cold_stack(n_states: int, n_actions: int, ntypes: int) -> np.ndarray:
    return np.zeros((ntypes, n_states, n_actions))


def train(scenario: Scenario, params: PhcParams, slots: int,
          init: InitTables | None, rng: np.random.Generator) -> TrainResult:
    """Run the learning game for ``slots`` slots over all eligible types.

    ``init`` carries (GCS tables, UAV tables) from a previous run, one pair
    per eligible type; None starts cold (Q zero, pi uniform).  Both initial
    previous-value observations are 0.  All randomness comes from ``rng``:
    uniforms are pre-generated as one (slots, types, 2) block with draw 0
    for the UAV and draw 1 for the GCS, so trajectories are reproducible
    for a given seed regardless of the execution path.
    """
    if slots < 1:
        raise ValidationError("slots", "must be at least 1")
    params = with_default_r_max(params, scenario)
    order = eligible_types(scenario)
    if not order:
        raise ValidationError("scenario", "no eligible types to train")
    reward_grid, size_grid = action_grids(params, scenario.s_max)
    na = reward_grid.shape[0]
    nb = size_grid.shape[0]
    j = len(order)
    if init is None:
        q_g = _cold_stack(nb, na, j)
        pi_g = np.full((j, nb, na), 1.0 / na)
        q_u = _cold_stack(na, nb, j)
        pi_u = np.full((j, na, nb), 1.0 / nb)
    else:
        gcs_init, uav_init = init
        if len(gcs_init) != j or len(uav_init) != j:
            raise ValidationError("init", "one table pair per eligible type")
        for t in list(gcs_init) + list(uav_init):
            t.check()
        q_g = np.stack([t.q for t in gcs_init]).astype(np.float64)
        pi_g = np.stack([t.pi for t in gcs_init]).astype(np.float64)
        q_u = np.stack([t.q for t in uav_init]).astype(np.float64)
        pi_u = np.stack([t.pi for t in uav_init]).astype(np.float64)
        if q_g.shape[1:] != (nb, na) or q_u.shape[1:] != (na, nb):
            raise ValidationError("init", "table shapes do not match grids")
    uniforms = rng.random((slots, j, 2))
    cost = np.array([ty.c for ty in order])
    weight = np.array([scenario.satisfaction_factor * ty.n / ty.t
                       for ty in order])
    count = np.array([float(ty.n) for ty in order])
    reward_index = np.zeros((slots, j), dtype=np.int64)
    size_index = np.zeros((slots, j), dtype=np.int64)
    gcs_state = np.zeros((slots, j), dtype=np.int64)
    uav_state = np.zeros((slots, j), dtype=np.int64)
    uav_utility = np.zeros((slots, j))
    gcs_term = np.zeros((slots, j))
    _kernels.train_loop(q_g, pi_g, q_u, pi_u, uniforms, reward_grid,
                        size_grid, cost, weight, count,
                        scenario.deployment_cost,
                        params.learning_rate_gcs, params.discount_gcs,
                        params.step_gcs, params.learning_rate_uav,
                        params.discount_uav, params.step_uav,
                        reward_index, size_index, gcs_state, uav_state,
                        uav_utility, gcs_term)
    log = EpisodeLog(type_indices=tuple(ty.index for ty in order),
                     reward_grid=reward_grid, size_grid=size_grid,
                     reward_index=reward_index, size_index=size_index,
                     gcs_state=gcs_state, uav_state=uav_state,
                     uav_utility=uav_utility, gcs_term=gcs_term)
    gcs_tables = tuple(PolicyTables(q=q_g[i], pi=pi_g[i]) for i in range(j))
    uav_tables = tuple(PolicyTables(q=q_u[i], pi=pi_u[i]) for i in range(j))
    return TrainResult(log=log, gcs_tables=gcs_tables, uav_tables=uav_tables)


def perturb_scenario(scenario: Scenario, rng: np.random.Generator,
                     rel_range: float = 0.2) -> Scenario:
    """A similar scenario: costs and counts jittered by +-rel_range.

    Counts round to the nearest integer and never drop below 1; eligibility
    structure (delays, t_max) is untouched so the learning problem keeps
    its shape.
    """
    if not 0.0 <= rel_range < 1.0:
        raise ValidationError("rel_range", "must lie in [0, 1)")
    new_types = []
    for ty in scenario.types:
        fc1 = 1.0 + rng.uniform(-rel_range, rel_range)
        fc2 = 1.0 + rng.uniform(-rel_range, rel_range)
        fn = 1.0 + rng.uniform(-rel_range, rel_range)
        n = max(1, int(round(ty.n * fn)))
        new_types.append(UavType(index=ty.index, c1=ty.c1 * fc1,
                                 c2=ty.c2 * fc2, t=ty.t, n=n))
    return Scenario(types=tuple(new_types),
                    satisfaction_factor=scenario.satisfaction_factor,
                    deployment_cost=scenario.deployment_cost,
                    s_max=scenario.s_max, t_max=scenario.t_max,
                    vdd_demand=scenario.vdd_demand,
                    total_uavs=sum(t.n for t in new_types))


def hotboot(family: Sequence[Scenario], episodes: int, params: PhcParams,
            rng: np.random.Generator, slots_per_episode: int = 2000
            ) -> tuple[tuple[PolicyTables, ...], tuple[PolicyTables, ...]]:
    """Pre-train tables offline on scenarios drawn from a family.

    Each episode picks a family member at random and continues training the
    same tables on it.  Zero episodes returns cold tables.  Grids are fixed
    from the first family member so action indices keep one meaning across
    the whole chain; every member must expose the same eligible type count.
    """
    if not family:
        raise ValidationError("family", "must contain at least one scenario")
    if episodes < 0:
        raise ValidationError("episodes", "must be non-negative")
    params = with_default_r_max(params, family[0])
    j = len(eligible_types(family[0]))
    na = params.reward_levels + 1
    nb = params.size_levels + 1
    gcs = tuple(PolicyTables.cold(nb, na) for _ in range(j))
    uav = tuple(PolicyTables.cold(na, nb) for _ in range(j))
    for _ in range(episodes):
        pick = int(rng.integers(0, len(family)))
        scenario = family[pick]
        if len(eligible_types(scenario)) != j:
            raise ValidationError("family", "eligible type counts differ")
        result = train(scenario, params, slots_per_episode, (gcs, uav), rng)
        gcs, uav = result.gcs_tables, result.uav_tables
    return gcs, uav


@dataclass(frozen=True)
class TypeConvergence:
    """Convergence verdict and modal actions for one learning type."""

    converged: bool
    size: float
    reward: float
    size_index: int
    reward_index: int


def _modal_share(column: np.ndarray, n_actions: int) -> tuple[int, float]:
    counts = np.bincount(column, minlength=n_actions)
    idx = int(np.argmax(counts))
    return idx, counts[idx] / column.shape[0]


def convergence_check(log: EpisodeLog, window: int,
                      tolerance: float = 0.95) -> list[TypeConvergence]:
    """Trailing-window modal stability test, one verdict per type.

    A type has converged when a single size action and a single reward
    action each hold at least ``tolerance`` of the last ``window`` slots.
    """
    if window < 1 or window > log.slots:
        raise InsufficientData(
            f"window {window} outside log length {log.slots}")
    out = []
    nb = log.size_grid.shape[0]
    na = log.reward_grid.shape[0]
    for j in range(len(log.type_indices)):
        b_idx, b_share = _modal_share(log.size_index[-window:, j], nb)
        a_idx, a_share = _modal_share(log.reward_index[-window:, j], na)
        out.append(TypeConvergence(
            converged=bool(b_share >= tolerance and a_share >= tolerance),
            size=float(log.size_grid[b_idx]),
            reward=float(log.reward_grid[a_idx]),
            size_index=b_idx, reward_index=a_idx))
    return out


def convergence_slot(log: EpisodeLog, window: int,
                     tolerance: float = 0.95) -> float:
    """Earliest slot count at which every type passes the window test.

    Returns the smallest m >= window such that the window ending at slot m
    is converged for all types simultaneously, or ``inf`` if the log never
    reaches that point.
    """
    if window < 1 or window > log.slots:
        raise InsufficientData(
            f"window {window} outside log length {log.slots}")
    slots = log.slots
    ok = np.ones(slots - window + 1, dtype=bool)
    for column, n_actions in ((log.size_index, log.size_grid.shape[0]),
                              (log.reward_index, log.reward_grid.shape[0])):
        for j in range(len(log.type_indices)):
            onehot = np.zeros((slots + 1, n_actions), dtype=np.int64)
            np.add.at(onehot, (np.arange(slots) + 1, column[:, j]), 1)
            cum = np.cumsum(onehot, axis=0)
            win = cum[window:] - cum[:-window]
            ok &= (win.max(axis=1) / window) >= tolerance
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        return float("inf")
    return float(hits[0] + window)
