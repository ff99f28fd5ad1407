"""Domain types and utility functions for the VDD trading game.

A ground control station (GCS) buys valid defense data (VDD) from UAV
honeypots.  Each UAV belongs to a type with a private marginal cost (the sum
of a collection and a privacy component) and a delivery delay; a contract
menu assigns every type a (vdd_size, reward) item.  This module holds the
type definitions, the two utility functions, the eligibility ordering, and
an exhaustive feasibility verifier for the individual-rationality (IR),
incentive-compatibility (IC) and monotonicity conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# IC binds with exact equality at the optimum, so feasibility comparisons
# need slack; strict comparisons would flag spurious violations.
FEASIBILITY_TOL = 1e-9

# deterministic tie nudge for equal marginal costs; affects ordering only
_COST_TIE_EPS = 1e-12


@dataclass(frozen=True)
class UavType:
    """One UAV type: costs, delivery delay, and population count.

    The marginal cost ``c`` is always the exact sum of the VDD-collection
    component ``c1`` and the privacy-leakage component ``c2``; it is exposed
    as a property so the identity cannot drift.
    """

    index: int
    c1: float
    c2: float
    t: float
    n: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"type index must be positive, got {self.index}")
        if self.c1 < 0 or self.c2 < 0 or self.c1 + self.c2 <= 0:
            raise ValueError(f"marginal cost components must be non-negative "
                             f"with a positive sum, got c1={self.c1}, c2={self.c2}")
        if self.t <= 0:
            raise ValueError(f"delay must be positive, got {self.t}")
        if self.n < 0:
            raise ValueError(f"count must be non-negative, got {self.n}")

    @property
    def c(self) -> float:
        """Marginal VDD cost, c1 + c2."""
        return self.c1 + self.c2


@dataclass(frozen=True)
class ContractItem:
    """A single menu entry: VDD size in bytes and its reward."""

    s: float
    r: float

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"vdd size must be non-negative, got {self.s}")
        if self.r < 0:
            raise ValueError(f"reward must be non-negative, got {self.r}")


@dataclass(frozen=True)
class ContractMenu:
    """Deadline plus one contract item per scenario type, in scenario order."""

    t_max: float
    items: tuple[ContractItem, ...]

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        object.__setattr__(self, "items", tuple(self.items))


@dataclass(frozen=True)
class Scenario:
    """Full problem instance: the type set and the GCS-side constants."""

    types: tuple[UavType, ...]
    satisfaction_factor: float
    deployment_cost: float
    s_max: float
    t_max: float
    vdd_demand: float
    total_uavs: int

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if not self.types:
            raise ValueError("scenario needs at least one type")
        if self.satisfaction_factor <= 0:
            raise ValueError("satisfaction_factor must be positive")
        if self.deployment_cost < 0:
            raise ValueError("deployment_cost must be non-negative")
        if self.s_max <= 0:
            raise ValueError("s_max must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        indices = [ty.index for ty in self.types]
        if len(set(indices)) != len(indices):
            raise ValueError(f"type indices must be distinct, got {indices}")
        counted = sum(ty.n for ty in self.types)
        if counted != self.total_uavs:
            raise ValueError(f"type counts sum to {counted} but total_uavs is "
                             f"{self.total_uavs}")


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the exhaustive IR/IC/monotonicity check.

    ``ir_violations`` holds (type index, own-item utility) pairs,
    ``ic_violations`` holds (type index, preferred foreign type index, gap)
    triples, and ``ineligible_nonzero`` lists ineligible types whose item is
    not the null contract.  A menu is feasible exactly when all three lists
    are empty and both monotone flags hold.
    """

    ir_violations: tuple = ()
    ic_violations: tuple = ()
    size_monotone: bool = True
    reward_monotone: bool = True
    ineligible_nonzero: tuple = ()

    @property
    def feasible(self) -> bool:
        return (not self.ir_violations and not self.ic_violations
                and self.size_monotone and self.reward_monotone
                and not self.ineligible_nonzero)


def uav_utility(uav_type: UavType, item: ContractItem, t_max: float,
                deployment_cost: float) -> float:
    """Utility a UAV of the given type earns from one contract item.

    Reward minus marginal cost times size minus the deployment cost.  A type
    whose delay exceeds the deadline falls into the zero-payment branch: it
    still pays its costs but the reward is withheld.

    Parameters
    ----------
    uav_type : UavType
        The responding type; only ``c`` and ``t`` are read.
    item : ContractItem
        The (size, reward) pair being evaluated, not necessarily the type's
        own menu item.
    t_max : float
        Delivery deadline in seconds.
    deployment_cost : float
        Fixed cost of operating the honeypot for the task window.
    """
    cost = uav_type.c * item.s + deployment_cost
    if uav_type.t <= t_max:
        return item.r - cost
    return -cost


def gcs_utility(scenario: Scenario, menu: ContractMenu) -> float:
    """GCS satisfaction minus payments, summed over types.

    Each type contributes ``w * (n/t) * ln(1 + s)`` of satisfaction (natural
    log) minus ``n * r`` of payment, with both terms suppressed entirely for
    types missing the deadline.
    """
    if len(menu.items) != len(scenario.types):
        raise ValueError(f"menu has {len(menu.items)} items for "
                         f"{len(scenario.types)} types")
    total = 0.0
    for ty, item in zip(scenario.types, menu.items):
        total += gcs_type_term(scenario, ty, item)
    return total


def gcs_type_term(scenario: Scenario, uav_type: UavType,
                  item: ContractItem) -> float:
    """One type's additive term of the GCS utility."""
    if uav_type.t > scenario.t_max:
        return 0.0
    w = scenario.satisfaction_factor * uav_type.n / uav_type.t
    return w * math.log1p(item.s) - uav_type.n * item.r


def eligible_types(scenario: Scenario) -> list[UavType]:
    """Types meeting the deadline, sorted by strictly descending marginal cost.

    The returned order is the solver's canonical index 1..J'.  Exactly equal
    costs are broken deterministically by nudging each cost down by
    ``1e-12 * index`` before sorting; the types themselves are returned
    unmodified.
    """
    chosen = [ty for ty in scenario.types if ty.t <= scenario.t_max]
    chosen.sort(key=lambda ty: -(ty.c - _COST_TIE_EPS * ty.index))
    return chosen


def item_for(scenario: Scenario, menu: ContractMenu,
             uav_type: UavType) -> ContractItem:
    """Menu item assigned to the given type (menus are in scenario order)."""
    for ty, item in zip(scenario.types, menu.items):
        if ty.index == uav_type.index:
            return item
    raise KeyError(f"type index {uav_type.index} not in scenario")


def verify_feasibility(scenario: Scenario, menu: ContractMenu,
                       tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    """Check IR for every eligible type, IC for every ordered pair, and
    monotonicity of sizes and rewards along the descending-cost order.

    Ineligible types are required to hold the null contract (s = r = 0) and
    are otherwise excluded from the IR/IC comparisons.  All utility
    comparisons carry tolerance ``tol`` because the optimal menu makes IR
    and adjacent IC bind with equality.
    """
    order = eligible_types(scenario)
    ir = []
    ic = []
    for ty in order:
        own = uav_utility(ty, item_for(scenario, menu, ty), scenario.t_max,
                          scenario.deployment_cost)
        if own < -tol:
            ir.append((ty.index, own))
        for other in order:
            if other.index == ty.index:
                continue
            foreign = uav_utility(ty, item_for(scenario, menu, other),
                                  scenario.t_max, scenario.deployment_cost)
            if foreign > own + tol:
                ic.append((ty.index, other.index, foreign - own))
    sizes = [item_for(scenario, menu, ty).s for ty in order]
    rewards = [item_for(scenario, menu, ty).r for ty in order]
    size_mono = all(a <= b + tol for a, b in zip(sizes, sizes[1:]))
    reward_mono = all(a <= b + tol for a, b in zip(rewards, rewards[1:]))
    bad_ineligible = tuple(
        ty.index for ty in scenario.types
        if ty.t > scenario.t_max
        and (item_for(scenario, menu, ty).s != 0.0
             or item_for(scenario, menu, ty).r != 0.0))
    return FeasibilityReport(ir_violations=tuple(ir), ic_violations=tuple(ic),
                             size_monotone=size_mono,
                             reward_monotone=reward_mono,
                             ineligible_nonzero=bad_ineligible)


def defensive_effectiveness(scenario: Scenario, menu: ContractMenu) -> float:
    """Aggregate contracted VDD over the GCS demand.

    The numerator weights each eligible type's size by its count, so the
    metric responds to population sweeps.
    """
    if scenario.vdd_demand <= 0:
        raise ValueError("vdd_demand must be positive")
    total = 0.0
    for ty in scenario.types:
        if ty.t <= scenario.t_max:
            total += ty.n * item_for(scenario, menu, ty).s
    return total / scenario.vdd_demand
