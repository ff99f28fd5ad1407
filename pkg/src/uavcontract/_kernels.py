"""Hot numeric kernels with a compiled path and a pure-numpy fallback.

Every kernel here is written as a plain function and then, unless the
environment variable ``UAVCONTRACT_DISABLE_JIT`` is set (or numba is
missing), rebound to a ``numba.njit(cache=True)`` compilation of itself at
import time.  Callers never notice the difference; the selected path is
reported in ``JIT_ENABLED``.  The two paths walk identical pre-generated
random numbers and identical expression trees, so trajectories agree across
paths to floating-point noise and are bit-identical within a path.

``benchmarks/jit_benchmark.py`` times both paths on the same workloads.
"""

from __future__ import annotations

import math
import os

import numpy as np

JIT_REQUESTED = os.environ.get("UAVCONTRACT_DISABLE_JIT", "") in ("", "0")


def nearest_bin(value, step, nbins):
    """Index of the nearest grid point on {0, step, ..., (nbins-1)*step}.

    Exact midpoints round down; out-of-range values clamp to the edges.
    A degenerate single-point grid (step 0) always maps to bin 0.
    """
    if nbins <= 1 or step <= 0.0:
        return 0
    k = int(math.ceil(value / step - 0.5))
    if k < 0:
        return 0
    if k > nbins - 1:
        return nbins - 1
    return k


def sample_index(row, u):
    """Inverse-CDF draw from a probability row using one uniform u."""
    acc = 0.0
    for i in range(row.shape[0] - 1):
        acc += row[i]
        if u < acc:
            return i
    return row.shape[0] - 1


def phc_step(q, pi, state, action, payoff, next_state, rate, discount, step):
    """One learner update: Bellman step on Q, then nudge pi toward greedy.

    The greedy action is read from the just-updated Q row (first index wins
    ties).  The pi row gains ``step`` on the greedy action, loses
    ``step / n_actions`` elsewhere, and is clamped to [0, 1] and
    renormalised so it stays a distribution.
    """
    best_next = q[next_state, 0]
    for i in range(1, q.shape[1]):
        if q[next_state, i] > best_next:
            best_next = q[next_state, i]
    q[state, action] = ((1.0 - rate) * q[state, action]
                        + rate * (payoff + discount * best_next))
    greedy = 0
    for i in range(1, q.shape[1]):
        if q[state, i] > q[state, greedy]:
            greedy = i
    n = pi.shape[1]
    dec = step / n
    total = 0.0
    for i in range(n):
        p = pi[state, i] + step if i == greedy else pi[state, i] - dec
        if p < 0.0:
            p = 0.0
        elif p > 1.0:
            p = 1.0
        pi[state, i] = p
        total += p
    for i in range(n):
        pi[state, i] /= total


def update_many(q, pi, states, actions, payoffs, next_states, rate, discount,
                step):
    """Apply a batch of updates in sequence (stress/property testing)."""
    for k in range(states.shape[0]):
        phc_step(q, pi, states[k], actions[k], payoffs[k], next_states[k],
                 rate, discount, step)


def train_loop(q_g, pi_g, q_u, pi_u, uniforms, rgrid, sgrid, cost, weight,
               count, c0, rate_g, disc_g, step_g, rate_u, disc_u, step_u,
               reward_idx, size_idx, gcs_state, uav_state, uav_pay, gcs_pay):
    """Run the two-tier learning game for every type over all slots.

    Slot order per type: the UAV observes the bin of the previous reward and
    samples a size; the GCS observes the bin of the size just delivered and
    samples a reward; both payoffs score the realised (size, reward) pair.
    The UAV's update closes in-slot (its next observation is the reward just
    set).  The GCS's update needs the next slot's delivery, so it is held
    pending one slot and the final slot's pending update is dropped.

    Tables are (types, states, actions) arrays updated in place; uniforms
    has shape (slots, types, 2) with draw 0 for the UAV and draw 1 for the
    GCS.  All trajectory arrays are (slots, types), filled in place.
    """
    slots = uniforms.shape[0]
    ntypes = uniforms.shape[1]
    na = rgrid.shape[0]
    nb = sgrid.shape[0]
    rstep = rgrid[1] - rgrid[0] if na > 1 else 0.0
    sstep = sgrid[1] - sgrid[0] if nb > 1 else 0.0
    for j in range(ntypes):
        prev_r = 0.0
        have_pending = False
        pend_state = 0
        pend_action = 0
        pend_pay = 0.0
        for t in range(slots):
            us = nearest_bin(prev_r, rstep, na)
            b = sample_index(pi_u[j, us], uniforms[t, j, 0])
            s_val = sgrid[b]
            gs = nearest_bin(s_val, sstep, nb)
            if have_pending:
                phc_step(q_g[j], pi_g[j], pend_state, pend_action, pend_pay,
                         gs, rate_g, disc_g, step_g)
            a = sample_index(pi_g[j, gs], uniforms[t, j, 1])
            r_val = rgrid[a]
            u_pay = r_val - cost[j] * s_val - c0
            g_pay = weight[j] * math.log1p(s_val) - count[j] * r_val
            phc_step(q_u[j], pi_u[j], us, b, u_pay,
                     nearest_bin(r_val, rstep, na), rate_u, disc_u, step_u)
            pend_state = gs
            pend_action = a
            pend_pay = g_pay
            have_pending = True
            reward_idx[t, j] = a
            size_idx[t, j] = b
            gcs_state[t, j] = gs
            uav_state[t, j] = us
            uav_pay[t, j] = u_pay
            gcs_pay[t, j] = g_pay
            prev_r = r_val


def oracle_scan_1(grid, w1, c1, n1, c0):
    """Best single size on the grid under the binding reward."""
    best_val = -np.inf
    best_i = 0
    for i in range(grid.shape[0]):
        val = w1 * math.log1p(grid[i]) - n1 * (c1 * grid[i] + c0)
        if val > best_val:
            best_val = val
            best_i = i
    return (best_i,)


def oracle_scan_2(grid, w1, w2, c1, c2, n1, n2, c0):
    """Best non-decreasing size pair on the grid under binding rewards."""
    best_val = -np.inf
    best_i = 0
    best_j = 0
    for i in range(grid.shape[0]):
        for j in range(i, grid.shape[0]):
            r1 = c1 * grid[i] + c0
            r2 = c2 * grid[j] + (c1 - c2) * grid[i] + c0
            val = (w1 * math.log1p(grid[i]) + w2 * math.log1p(grid[j])
                   - n1 * r1 - n2 * r2)
            if val > best_val:
                best_val = val
                best_i = i
                best_j = j
    return (best_i, best_j)


def oracle_scan_3(grid, w1, w2, w3, c1, c2, c3, n1, n2, n3, c0):
    """Best non-decreasing size triple on the grid under binding rewards."""
    best_val = -np.inf
    best_i = 0
    best_j = 0
    best_k = 0
    for i in range(grid.shape[0]):
        for j in range(i, grid.shape[0]):
            for k in range(j, grid.shape[0]):
                r1 = c1 * grid[i] + c0
                r2 = c2 * grid[j] + (c1 - c2) * grid[i] + c0
                r3 = (c3 * grid[k] + (c1 - c2) * grid[i]
                      + (c2 - c3) * grid[j] + c0)
                val = (w1 * math.log1p(grid[i]) + w2 * math.log1p(grid[j])
                       + w3 * math.log1p(grid[k])
                       - n1 * r1 - n2 * r2 - n3 * r3)
                if val > best_val:
                    best_val = val
                    best_i = i
                    best_j = j
                    best_k = k
    return (best_i, best_j, best_k)


def _vector_oracle_scan_2(grid, w1, w2, c1, c2, n1, n2, c0):
    """Numpy fallback: same search as oracle_scan_2 without the inner loops."""
    logs = np.log1p(grid)
    r1 = c1 * grid + c0
    term_i = w1 * logs - n1 * r1 - n2 * ((c1 - c2) * grid)
    term_j = w2 * logs - n2 * (c2 * grid + c0)
    vals = term_i[:, None] + term_j[None, :]
    vals[np.tril_indices(grid.shape[0], k=-1)] = -np.inf
    flat = int(np.argmax(vals))
    return (flat // grid.shape[0], flat % grid.shape[0])


def _vector_oracle_scan_3(grid, w1, w2, w3, c1, c2, c3, n1, n2, n3, c0):
    """Numpy fallback: outer python loop over the first size only."""
    m = grid.shape[0]
    logs = np.log1p(grid)
    term_j = w2 * logs - n2 * (c2 * grid + c0) - n3 * ((c2 - c3) * grid)
    term_k = w3 * logs - n3 * (c3 * grid + c0)
    jk = term_j[:, None] + term_k[None, :]
    jk[np.tril_indices(m, k=-1)] = -np.inf
    best_val = -np.inf
    best = (0, 0, 0)
    for i in range(m):
        base = (w1 * logs[i] - n1 * (c1 * grid[i] + c0)
                - (n2 + n3) * ((c1 - c2) * grid[i]))
        sub = jk[i:, i:]
        flat = int(np.argmax(sub))
        j = i + flat // sub.shape[1]
        k = i + flat % sub.shape[1]
        val = base + term_j[j] + term_k[k]
        if val > best_val:
            best_val = val
            best = (i, j, k)
    return best


JIT_ENABLED = False
if JIT_REQUESTED:
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:
        # rebind in dependency order so compiled kernels call compiled helpers
        nearest_bin = njit(cache=True)(nearest_bin)
        sample_index = njit(cache=True)(sample_index)
        phc_step = njit(cache=True)(phc_step)
        update_many = njit(cache=True)(update_many)
        train_loop = njit(cache=True)(train_loop)
        oracle_scan_1 = njit(cache=True)(oracle_scan_1)
        oracle_scan_2 = njit(cache=True)(oracle_scan_2)
        oracle_scan_3 = njit(cache=True)(oracle_scan_3)
        JIT_ENABLED = True

if not JIT_ENABLED:
    # the scalar scans are far too slow in plain python; swap in the
    # vectorised equivalents (identical search order and tie handling)
    oracle_scan_2 = _vector_oracle_scan_2
    oracle_scan_3 = _vector_oracle_scan_3


def warmup():
    """Force compilation of every kernel (no-op on the pure path).

    Timed code should call this first so compile time never lands inside a
    measured region.
    """
    grid = np.linspace(0.0, 1.0, 3)
    oracle_scan_1(grid, 1.0, 1.0, 1.0, 1.0)
    oracle_scan_2(grid, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0, 1.0)
    oracle_scan_3(grid, 1.0, 1.0, 1.0, 1.0, 0.5, 0.25, 1.0, 1.0, 1.0, 1.0)
    q = np.zeros((1, 2, 2))
    pi = np.full((1, 2, 2), 0.5)
    out_i = np.zeros((2, 1), dtype=np.int64)
    out_f = np.zeros((2, 1))
    train_loop(q.copy(), pi.copy(), q.copy(), pi.copy(),
               np.full((2, 1, 2), 0.5), grid[:2], grid[:2],
               np.ones(1), np.ones(1), np.ones(1), 0.0,
               0.5, 0.5, 0.1, 0.5, 0.5, 0.1,
               out_i.copy(), out_i.copy(), out_i.copy(), out_i.copy(),
               out_f.copy(), out_f.copy())
    update_many(q[0], pi[0], np.zeros(1, dtype=np.int64),
                np.zeros(1, dtype=np.int64), np.zeros(1),
                np.zeros(1, dtype=np.int64), 0.5, 0.5, 0.1)
