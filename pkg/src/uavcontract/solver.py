"""Optimal contract menus and baselines.

The partial-information optimum follows the reduced problem: rewards are
pinned to the sizes by the binding IR/IC structure, the per-type relaxed
objective is strictly concave with a closed-form maximizer, and a violated
monotonicity constraint is repaired by bunching adjacent types into pools
that share the pooled maximizer.  Baselines: complete-information menu,
linear pricing with UAV best response, and the uniform single-item menu.
A brute-force grid oracle validates the closed form on small type counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import TooManyTypes
from .game import (ContractItem, ContractMenu, Scenario, UavType,
                   eligible_types, gcs_utility)


@dataclass(frozen=True)
class SolverTrace:
    """Intermediate solver state kept for reporting and tests.

    ``eligible_order`` lists type indices in descending-cost order,
    ``unconstrained_sizes`` the relaxed per-type maximizers before
    monotonicity repair, and ``pools`` the index ranges (start, end)
    inclusive over eligible positions that were merged during ironing.
    """

    eligible_order: tuple[int, ...]
    unconstrained_sizes: tuple[float, ...]
    pools: tuple[tuple[int, int], ...]
    final_menu: ContractMenu


def _coefficients(scenario: Scenario, order: list[UavType]):
    """Per eligible position: satisfaction weight w_j and the linear cost
    coefficient a_j of the relaxed objective.

    a_j couples type j's own payment to the information rents it creates for
    every cheaper type below it in the order; for the last type it reduces
    to the plain cost times count.
    """
    counts = [ty.n for ty in order]
    suffix = list(np.cumsum(counts[::-1])[::-1])
    suffix.append(0)
    w = []
    a = []
    for pos, ty in enumerate(order):
        w.append(scenario.satisfaction_factor * ty.n / ty.t)
        next_c = order[pos + 1].c if pos + 1 < len(order) else 0.0
        a.append(ty.c * suffix[pos] - next_c * suffix[pos + 1])
    return w, a


def objective_term(scenario: Scenario, j: int, s: float) -> float:
    """Relaxed objective contribution of eligible position j (1-based) at size s."""
    order = eligible_types(scenario)
    if not 1 <= j <= len(order):
        raise IndexError(f"eligible position {j} out of range 1..{len(order)}")
    w, a = _coefficients(scenario, order)
    return w[j - 1] * math.log1p(s) - a[j - 1] * s


def optimal_vdd_unconstrained(scenario: Scenario) -> list[float]:
    """Relaxed per-type size maximizers, clamped to [0, s_max].

    The stationary point of w*ln(1+s) - a*s is w/a - 1.  A non-positive a
    (possible only for degenerate inputs such as zero-count types tied in
    cost) makes the objective non-decreasing, so the boundary s_max is the
    maximizer.
    """
    order = eligible_types(scenario)
    if not order:
        raise ValueError("no eligible types: every delay exceeds t_max")
    w, a = _coefficients(scenario, order)
    sizes = []
    for wj, aj in zip(w, a):
        if aj <= 0.0:
            sizes.append(scenario.s_max)
        else:
            sizes.append(min(max(wj / aj - 1.0, 0.0), scenario.s_max))
    return sizes


def _pooled_size(scenario, w, a, start, end) -> float:
    """Maximizer of the pooled concave objective over positions [start, end]."""
    wsum = sum(w[start:end + 1])
    asum = sum(a[start:end + 1])
    if asum <= 0.0:
        return scenario.s_max
    return min(max(wsum / asum - 1.0, 0.0), scenario.s_max)


def _iron_trace(scenario: Scenario, sizes: list[float]):
    order = eligible_types(scenario)
    w, a = _coefficients(scenario, order)
    if len(sizes) != len(order):
        raise ValueError(f"{len(sizes)} sizes for {len(order)} eligible types")
    # each pool is [start, end] over eligible positions with one shared value
    pools = [[i, i, s] for i, s in enumerate(sizes)]
    i = 0
    while i + 1 < len(pools):
        if pools[i][2] > pools[i + 1][2] + 0.0:
            lo, hi = pools[i][0], pools[i + 1][1]
            merged = [lo, hi, _pooled_size(scenario, w, a, lo, hi)]
            pools[i:i + 2] = [merged]
            # a merged pool can undercut its left neighbour; re-check backwards
            i = max(i - 1, 0)
        else:
            i += 1
    ironed = [0.0] * len(sizes)
    merged_ranges = []
    for lo, hi, val in pools:
        for k in range(lo, hi + 1):
            ironed[k] = val
        if hi > lo:
            merged_ranges.append((lo, hi))
    return ironed, tuple(merged_ranges)


def iron(scenario: Scenario, sizes: list[float]) -> list[float]:
    """Closest non-decreasing repair of the relaxed sizes.

    Repeatedly merges a decreasing adjacent pair into a pool holding the
    pooled objective's maximizer, re-checking merged pools against their
    neighbours, until the sequence is non-decreasing.  Monotone input is
    returned unchanged.
    """
    ironed, _ = _iron_trace(scenario, sizes)
    return ironed


def optimal_rewards(scenario: Scenario, sizes: list[float]) -> list[float]:
    """Rewards that make IR bind for the costliest type and each adjacent
    downward IC bind with equality, given non-decreasing sizes."""
    order = eligible_types(scenario)
    if len(sizes) != len(order):
        raise ValueError(f"{len(sizes)} sizes for {len(order)} eligible types")
    rewards = []
    rent = 0.0
    for pos, ty in enumerate(order):
        rewards.append(ty.c * sizes[pos] + rent + scenario.deployment_cost)
        next_c = order[pos + 1].c if pos + 1 < len(order) else 0.0
        rent += (ty.c - next_c) * sizes[pos]
    return rewards


def _assemble_menu(scenario: Scenario, order: list[UavType],
                   sizes: list[float], rewards: list[float]) -> ContractMenu:
    """Menu in scenario order; ineligible types get the null item."""
    by_index = {ty.index: (s, r) for ty, s, r in zip(order, sizes, rewards)}
    items = []
    for ty in scenario.types:
        s, r = by_index.get(ty.index, (0.0, 0.0))
        items.append(ContractItem(s=s, r=r))
    return ContractMenu(t_max=scenario.t_max, items=tuple(items))


def solve_partial_info(scenario: Scenario) -> tuple[ContractMenu, SolverTrace]:
    """Optimal menu when the GCS knows type counts but not identities."""
    order = eligible_types(scenario)
    unconstrained = optimal_vdd_unconstrained(scenario)
    sizes, pools = _iron_trace(scenario, unconstrained)
    rewards = optimal_rewards(scenario, sizes)
    menu = _assemble_menu(scenario, order, sizes, rewards)
    trace = SolverTrace(eligible_order=tuple(ty.index for ty in order),
                        unconstrained_sizes=tuple(unconstrained),
                        pools=pools, final_menu=menu)
    return menu, trace


def solve_complete_info(scenario: Scenario) -> ContractMenu:
    """Optimal menu when the GCS can identify each UAV's type.

    Only IR binds: every type's size is its first-best maximizer and the
    reward repays exactly cost plus deployment, leaving zero utility.
    """
    order = eligible_types(scenario)
    sizes = []
    rewards = []
    for ty in order:
        s = scenario.satisfaction_factor / (ty.t * ty.c) - 1.0
        s = min(max(s, 0.0), scenario.s_max)
        sizes.append(s)
        rewards.append(ty.c * s + scenario.deployment_cost)
    return _assemble_menu(scenario, order, sizes, rewards)


def linear_contract(scenario: Scenario, unit_price: float) -> ContractMenu:
    """Per-byte pricing with each UAV best-responding.

    A type cheaper than the unit price sells everything, a costlier one
    sells nothing, and exact indifference resolves to nothing because any
    trade at cost still leaves the deployment cost unrecovered.
    """
    if unit_price <= 0:
        raise ValueError(f"unit_price must be positive, got {unit_price}")
    order = eligible_types(scenario)
    sizes = [scenario.s_max if ty.c < unit_price else 0.0 for ty in order]
    rewards = [unit_price * s + scenario.deployment_cost for s in sizes]
    return _assemble_menu(scenario, order, sizes, rewards)


def uniform_contract(scenario: Scenario) -> ContractMenu:
    """Single-item menu: everyone gets the costliest eligible type's
    partial-information item."""
    menu, trace = solve_partial_info(scenario)
    order = eligible_types(scenario)
    first = trace.final_menu.items[
        [ty.index for ty in scenario.types].index(trace.eligible_order[0])]
    sizes = [first.s] * len(order)
    rewards = [first.r] * len(order)
    return _assemble_menu(scenario, order, sizes, rewards)


def _size_grid(s_max: float, step: float) -> np.ndarray:
    """Multiples of step capped at s_max, with s_max itself always last."""
    if step <= 0:
        raise ValueError(f"grid_step must be positive, got {step}")
    # tolerate float wobble when s_max is an exact multiple of step
    n_steps = int(math.floor(s_max / step * (1.0 + 1e-12) + 1e-12))
    grid = np.arange(n_steps + 1) * step
    if grid[-1] > s_max:
        grid[-1] = s_max
    elif s_max - grid[-1] > 1e-9 * step:
        grid = np.append(grid, s_max)
    else:
        grid[-1] = s_max
    return grid


def brute_force_oracle(scenario: Scenario, grid_step: float) -> ContractMenu:
    """Exhaustive validation oracle for up to three eligible types.

    Enumerates every non-decreasing size tuple on the grid, prices it with
    the binding reward structure, and returns the GCS-utility argmax.  The
    scan runs in a compiled kernel when JIT is enabled and falls back to a
    vectorised numpy path otherwise.
    """
    order = eligible_types(scenario)
    jprime = len(order)
    if jprime > 3:
        raise TooManyTypes(f"oracle supports at most 3 eligible types, got {jprime}")
    if jprime == 0:
        raise ValueError("no eligible types: every delay exceeds t_max")
    grid = _size_grid(scenario.s_max, grid_step)
    w, _ = _coefficients(scenario, order)
    c = [ty.c for ty in order]
    n = [float(ty.n) for ty in order]
    c0 = scenario.deployment_cost
    if jprime == 1:
        best = _kernels.oracle_scan_1(grid, w[0], c[0], n[0], c0)
    elif jprime == 2:
        best = _kernels.oracle_scan_2(grid, w[0], w[1], c[0], c[1],
                                      n[0], n[1], c0)
    else:
        best = _kernels.oracle_scan_3(grid, w[0], w[1], w[2], c[0], c[1],
                                      c[2], n[0], n[1], n[2], c0)
    sizes = [float(grid[k]) for k in best]
    rewards = optimal_rewards(scenario, sizes)
    return _assemble_menu(scenario, order, sizes, rewards)


def oracle_resolution_bound(scenario: Scenario, grid_step: float) -> float:
    """Upper bound on the closed-form-minus-oracle utility gap.

    Rounding every optimal size to its nearest grid point keeps the tuple
    non-decreasing and moves each size by at most one step, so the utility
    drops by at most the sum of the per-size Lipschitz constants times the
    step: w_j bounds the log term's slope and a_j the payment side's.
    """
    order = eligible_types(scenario)
    w, a = _coefficients(scenario, order)
    return grid_step * (sum(w) + sum(abs(x) for x in a))


def menu_utilities(scenario: Scenario, menu: ContractMenu) -> list[float]:
    """Own-item utility per scenario type, in scenario order."""
    from .game import uav_utility
    return [uav_utility(ty, item, scenario.t_max, scenario.deployment_cost)
            for ty, item in zip(scenario.types, menu.items)]
