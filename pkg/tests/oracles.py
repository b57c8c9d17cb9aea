"""Independent oracles used to freeze expected values in tests.

Everything here evaluates target quantities by brute force or direct
arithmetic, never by the closed forms under test.
"""
from __future__ import annotations

import math

import numpy as np


def refine_1d(fn, lo: float, hi: float, rounds: int = 60, points: int = 17) -> float:
    """Argmin of a 1-D function by repeated grid shrinking."""
    for _ in range(rounds):
        ts = np.linspace(lo, hi, points)
        vals = [fn(float(t)) for t in ts]
        i = int(np.argmin(vals))
        lo = float(ts[max(i - 1, 0)])
        hi = float(ts[min(i + 1, points - 1)])
    return 0.5 * (lo + hi)


def ball2_argmin(x, g, gamma: float, lam: float = 0.0,
                 radius: float = 1.0, center=(0.0, 0.0),
                 rounds: int = 48) -> np.ndarray:
    """Brute-force argmin of <y,g> + lam*|y|_1 + |y-x|^2/(2*gamma) over a
    2-D ball, by grid refinement restricted to feasible points."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    c = np.asarray(center, dtype=float)

    def phi(y):
        return float(y @ g) + lam * float(np.abs(y).sum()) + float(
            (y - x) @ (y - x)
        ) / (2.0 * gamma)

    def pull_in(y):
        # infeasible grid nodes are pulled onto the sphere so candidates
        # stay dense near boundary argmins
        d = y - c
        r = math.sqrt(float(d @ d))
        return y if r <= radius else c + d * (radius / r)

    lo = c - radius
    hi = c + radius
    best = x.copy()
    for _ in range(rounds):
        us = np.linspace(lo[0], hi[0], 13)
        vs = np.linspace(lo[1], hi[1], 13)
        pts = [pull_in(np.array([u, v])) for u in us for v in vs]
        pts.append(best)
        vals = [phi(p) for p in pts]
        best = pts[int(np.argmin(vals))]
        span = (hi - lo) / 4.0
        lo = np.maximum(best - span, c - radius)
        hi = np.minimum(best + span, c + radius)
    return best


def simplex2_argmin(x, g, gamma: float) -> np.ndarray:
    """Brute-force argmin of <y,g> + KL(y,x)/gamma over the 2-simplex."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)

    def phi(t: float) -> float:
        t = min(max(t, 1e-15), 1.0 - 1e-15)
        y = np.array([t, 1.0 - t])
        kl = float(np.sum(y * (np.log(y) - np.log(x))))
        return float(y @ g) + kl / gamma

    t = refine_1d(phi, 1e-12, 1.0 - 1e-12)
    return np.array([t, 1.0 - t])


def weighted_average(points, gammas, m: float) -> np.ndarray:
    """Direct weighted-sum arithmetic for the m-scheme average."""
    num = np.zeros_like(np.asarray(points[0], dtype=float))
    den = 0.0
    for p, gam in zip(points, gammas):
        w = gam ** (-m)
        num = num + w * np.asarray(p, dtype=float)
        den += w
    return num / den


def kl_divergence(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.sum(x * (np.log(x) - np.log(y))) - np.sum(x) + np.sum(y))


def simplex_project_qp(v, rounds: int = 64) -> np.ndarray:
    """Euclidean projection onto the 2-simplex by 1-D refinement."""
    v = np.asarray(v, dtype=float)

    def phi(t: float) -> float:
        y = np.array([t, 1.0 - t])
        return float((y - v) @ (y - v))

    t = refine_1d(phi, 0.0, 1.0, rounds=rounds)
    return np.array([t, 1.0 - t])


def norm_direct(x, kind: str) -> float:
    x = np.asarray(x, dtype=float)
    if kind == "l1":
        return float(np.sum(np.abs(x)))
    if kind == "l2":
        return math.sqrt(float(x @ x))
    return float(np.max(np.abs(x))) if x.size else 0.0
