"""Exact continuous battery/DG sub-problems, vectorized over many residual profiles.

Peak-shaving form (one row of ``R`` per discrete option combination)::

    minimize   beta * p + c * sum(g)
    subject to b_t + g_t >= R_t - p,  0 <= b_t <= Pb,  0 <= g_t <= Pg,  sum(b) <= B

For a fixed level ``p`` the cheapest DG energy is

    G(p) = max(sum((R - Pb - p)+), sum((R - p)+) - B)

and the level is feasible iff ``max(R) - Pb - Pg <= p`` and ``sum((R - Pg - p)+) <= B``.
``beta * p + c * G(p)`` is convex and piecewise linear in ``p``, so its minimum sits
on a kink: an ``R_t``, an ``R_t - Pb``, the level where the two branches of ``G``
cross, or the lower feasibility bound. All of them are evaluated exactly.

``B`` is the battery energy available to the grid in MW-steps, i.e.
``efficiency * (E_max - E_min) / dt`` for a discharge-only battery starting full.
"""

from __future__ import annotations

import math

import numpy as np


def water_level(R, cap: float, budget: float) -> np.ndarray:
    """Level ``p`` per row where ``sum(clip(R - p, 0, cap)) == budget``.

    Returns ``-inf`` for rows where the sum can never reach ``budget`` (finite cap).
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    n, k = R.shape
    tol = 1e-12 * max(1.0, budget)
    if budget <= tol:
        return R.max(axis=1)
    finite = math.isfinite(cap)
    bps = np.concatenate([R, R - cap], axis=1) if finite else R.copy()
    bps.sort(axis=1)
    fill = np.clip(R[:, None, :] - bps[:, :, None], 0.0, cap).sum(axis=2)  # (n, m), non-increasing
    out = np.empty(n)
    top = fill[:, 0]
    above = budget >= top
    if finite:
        out[above] = -np.inf
    else:
        out[above] = bps[above, 0] - (budget - top[above]) / k
    rows = np.flatnonzero(~above)
    if rows.size:
        f = fill[rows]
        # last breakpoint whose fill still reaches the budget; the tolerance keeps
        # flat stretches resolving to their upper end despite rounding
        j = (f >= budget - tol).sum(axis=1) - 1
        r = np.arange(rows.size)
        f0, f1 = f[r, j], f[r, j + 1]
        x0, x1 = bps[rows, j], bps[rows, j + 1]
        out[rows] = x0 + (f0 - budget) / (f0 - f1) * (x1 - x0)
    return out


def dg_energy(R, p, Pb: float, B: float) -> np.ndarray:
    """Minimum DG energy (MW-steps) that holds each row at or below level ``p``."""
    R = np.atleast_2d(R)
    p = np.asarray(p, dtype=float)
    excess = np.maximum(R[..., None, :] - p[..., None], 0.0) if p.ndim == 2 else \
        np.maximum(R - p[:, None], 0.0)
    over_cap = np.maximum(excess - Pb, 0.0).sum(axis=-1)
    over_budget = excess.sum(axis=-1) - B
    return np.maximum(over_cap, over_budget)


def lowest_level(R, Pb: float, B: float, Pg: float) -> np.ndarray:
    R = np.atleast_2d(np.asarray(R, dtype=float))
    by_power = R.max(axis=1) - Pb - Pg
    by_energy = water_level(R - Pg, math.inf, B)
    return np.maximum(by_power, by_energy)


def solve_levels(R, Pb: float, B: float, Pg: float, cost: float, beta: float):
    """Optimal level and DG energy per row.

    Returns ``(p, G, J)`` with ``J = beta * p + cost * G`` minimal; among equal-cost
    levels the highest one (least dispatch) is returned.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    n, k = R.shape
    top = R.max(axis=1)
    lo = lowest_level(R, Pb, B, Pg)
    cands = [R, top[:, None], lo[:, None]]
    if Pb > 0:
        cands.append(R - Pb)
        if B > 0:
            cands.append(water_level(R, Pb, B)[:, None])
    P = np.concatenate(cands, axis=1)
    P = np.maximum(np.where(np.isfinite(P), P, lo[:, None]), lo[:, None])
    G = dg_energy(R, P, Pb, B)
    J = beta * P + cost * G
    best = J.min(axis=1, keepdims=True)
    tied = J <= best + 1e-12 * np.maximum(1.0, np.abs(best))
    pick = np.where(tied, P, -np.inf).argmax(axis=1)
    r = np.arange(n)
    return P[r, pick], G[r, pick], J[r, pick]


def allocate(R_row, p: float, Pb: float, B: float, Pg: float):
    """Battery and DG per hour that hold one residual row at level ``p`` with least DG energy.

    Battery energy beyond the mandatory minimum goes to the earliest hours first.
    """
    R_row = np.asarray(R_row, dtype=float)
    need = np.maximum(R_row - p, 0.0)
    lower = np.maximum(need - Pg, 0.0)
    upper = np.minimum(Pb, need)
    spare = max(0.0, B - lower.sum())
    b = lower.copy()
    for t in range(len(b)):
        add = min(upper[t] - b[t], spare)
        if add > 0:
            b[t] += add
            spare -= add
    b = np.clip(b, 0.0, Pb)
    g = np.clip(need - b, 0.0, Pg)
    return b, g


def weighted_allocation(weights, Pb: float, B: float, Pg: float, cost: float, beta: float):
    """Per-hour battery and DG maximizing ``beta * sum(w * (b + g)) - cost * sum(g)``.

    The battery fills hours in order of decreasing weight (earlier hour first on ties);
    DG runs at full output wherever its weighted value exceeds its cost.
    """
    w = np.asarray(weights, dtype=float)
    b = np.zeros_like(w)
    g = np.where(beta * w > cost, Pg, 0.0)
    left = B
    for t in np.argsort(-w, kind="stable"):
        if w[t] <= 0 or left <= 0:
            break
        b[t] = min(Pb, left)
        left -= b[t]
    return b, g
