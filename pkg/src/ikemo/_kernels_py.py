"""Pure numpy implementations of the hot evolution kernels.

Mirrors ikemo._kernels_c operation by operation; the compiled module is
preferred at import time when available.  All randomness is injected as
pre-drawn uniform arrays so both backends consume the generator
identically.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_EPS = 1e-14


def nondominated_ranks(f: np.ndarray, cv: np.ndarray) -> np.ndarray:
    """Constrained non-dominated sorting; returns the 0-based front index.

    p dominates q when cv_p < cv_q, or, at equal zero violation, when p
    Pareto-dominates q in objective space.
    """
    f = np.asarray(f, dtype=float)
    cv = np.asarray(cv, dtype=float)
    n = f.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    less = f[:, np.newaxis, :] < f[np.newaxis, :, :]
    leq = f[:, np.newaxis, :] <= f[np.newaxis, :, :]
    pareto = leq.all(axis=2) & less.any(axis=2)
    cv_lt = cv[:, np.newaxis] < cv[np.newaxis, :]
    both_feasible = (cv[:, np.newaxis] == 0.0) & (cv[np.newaxis, :] == 0.0)
    dom = cv_lt | (both_feasible & pareto)

    counts = dom.sum(axis=0).astype(np.int64)
    ranks = np.full(n, -1, dtype=np.int64)
    remaining = np.ones(n, dtype=bool)
    current = 0
    while remaining.any():
        front = remaining & (counts == 0)
        assert front.any(), "dominance relation must be acyclic"
        ranks[front] = current
        counts = counts - dom[front].sum(axis=0)
        remaining &= ~front
        current += 1
    return ranks


def crowding_from_orders(f: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """Crowding distance for one front given per-objective sort orders."""
    f = np.asarray(f, dtype=float)
    k, m = f.shape
    d = np.zeros(k, dtype=float)
    for obj in range(m):
        o = orders[:, obj]
        lo = f[o[0], obj]
        hi = f[o[-1], obj]
        d[o[0]] = np.inf
        d[o[-1]] = np.inf
        span = hi - lo
        if span <= 0.0 or k <= 2:
            continue
        gaps = (f[o[2:], obj] - f[o[:-2], obj]) / span
        d[o[1:-1]] += gaps
    return d


def sbx_pairs(p1: np.ndarray, p2: np.ndarray, lower: np.ndarray, upper: np.ndarray,
              eta: float, p_c: float, pair_u: np.ndarray, u_gene: np.ndarray,
              u_beta: np.ndarray, u_swap: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched bounded simulated binary crossover.

    Shapes: parents (q, d); pair_u (q,); per-gene uniforms (q, d).
    A pair crosses only when pair_u <= p_c; within a crossing pair each
    gene crosses when u_gene <= 0.5 and the parents differ.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    c1 = p1.copy()
    c2 = p2.copy()
    active = (pair_u <= p_c)[:, np.newaxis] & (u_gene <= 0.5) & (np.abs(p1 - p2) > _EPS)
    if not active.any():
        return c1, c2

    y1 = np.minimum(p1, p2)
    y2 = np.maximum(p1, p2)
    dy = np.where(active, y2 - y1, 1.0)
    yl = np.broadcast_to(lower, p1.shape)
    yu = np.broadcast_to(upper, p1.shape)
    exp = 1.0 / (eta + 1.0)
    r = u_beta

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        beta = 1.0 + 2.0 * (y1 - yl) / dy
        alpha = 2.0 - np.power(beta, -(eta + 1.0))
        betaq = np.where(r <= 1.0 / alpha,
                         np.power(r * alpha, exp),
                         np.power(1.0 / (2.0 - r * alpha), exp))
        lo_child = 0.5 * ((y1 + y2) - betaq * dy)

        beta = 1.0 + 2.0 * (yu - y2) / dy
        alpha = 2.0 - np.power(beta, -(eta + 1.0))
        betaq = np.where(r <= 1.0 / alpha,
                         np.power(r * alpha, exp),
                         np.power(1.0 / (2.0 - r * alpha), exp))
        hi_child = 0.5 * ((y1 + y2) + betaq * dy)

    lo_child = np.clip(lo_child, yl, yu)
    hi_child = np.clip(hi_child, yl, yu)
    swap = u_swap <= 0.5
    out1 = np.where(swap, hi_child, lo_child)
    out2 = np.where(swap, lo_child, hi_child)
    c1[active] = out1[active]
    c2[active] = out2[active]
    return c1, c2


def polynomial_mutation(x: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                        eta: float, p_m: float, u_apply: np.ndarray,
                        u_delta: np.ndarray) -> np.ndarray:
    """Batched bounded polynomial mutation; shapes (q, d)."""
    x = np.asarray(x, dtype=float)
    out = x.copy()
    active = u_apply <= p_m
    if not active.any():
        return out
    yl = np.broadcast_to(lower, x.shape)
    yu = np.broadcast_to(upper, x.shape)
    span = yu - yl
    d1 = (x - yl) / span
    d2 = (yu - x) / span
    r = u_delta
    mp = 1.0 / (eta + 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        low_branch = r <= 0.5
        xy = np.where(low_branch, 1.0 - d1, 1.0 - d2)
        powed = np.power(xy, eta + 1.0)
        val = np.where(low_branch,
                       2.0 * r + (1.0 - 2.0 * r) * powed,
                       2.0 * (1.0 - r) + 2.0 * (r - 0.5) * powed)
        deltaq = np.where(low_branch,
                          np.power(val, mp) - 1.0,
                          1.0 - np.power(val, mp))
    mutated = np.clip(x + deltaq * span, yl, yu)
    out[active] = mutated[active]
    return out
