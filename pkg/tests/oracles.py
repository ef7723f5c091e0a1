"""Brute-force reference computations shared by the test modules."""
from itertools import combinations, product

import numpy as np

from sparseobs.conditions import null_space_basis
from sparseobs.recovery import l1_recover

VALUES = (-2.0, -1.0, 1.0, 2.0)


def exhaustive_l1(Phi, k, solver=l1_recover):
    """True iff every k-sparse vector with entries in {+-1, +-2} is recovered."""
    n = Phi.shape[1]
    for support in combinations(range(n), k):
        for vals in product(VALUES, repeat=k):
            x = np.zeros(n)
            x[list(support)] = vals
            x_hat = solver(Phi, Phi @ x).x0
            if np.max(np.abs(x_hat - x)) > 1e-6 * (1 + np.max(np.abs(x))):
                return False
    return True


def power_iteration_extremes(G, rng, iters=3000, restarts=3):
    """Largest and smallest eigenvalue of a small PSD matrix by power iteration."""
    k = G.shape[0]
    shift = np.trace(G) + 1.0
    best_hi, best_lo = -np.inf, np.inf
    for _ in range(restarts):
        for M, sign in ((G, 1.0), (shift * np.eye(k) - G, -1.0)):
            v = rng.normal(size=k)
            for _ in range(iters):
                v = M @ v
                v /= np.linalg.norm(v)
            rq = float(v @ G @ v)
            if sign > 0:
                best_hi = max(best_hi, rq)
            else:
                best_lo = min(best_lo, rq)
    return best_lo, best_hi


def grid_ratio(Phi, K, points=4001):
    """Largest top-K / rest l1 ratio over a dense grid of null-space directions."""
    N = null_space_basis(Phi)
    d = N.shape[1]
    if d == 0:
        return 0.0
    if d == 1:
        Z = np.array([[1.0]])
    elif d == 2:
        th = np.linspace(0.0, np.pi, points)
        Z = np.stack([np.cos(th), np.sin(th)], axis=1)
    else:
        th = np.linspace(0.0, np.pi, 181)
        ph = np.linspace(0.0, 2 * np.pi, 361)
        T, P = np.meshgrid(th, ph)
        Z = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)
    W = np.abs(Z @ N.T)
    W.sort(axis=1)
    top = W[:, -K:].sum(axis=1)
    rest = W[:, :-K].sum(axis=1)
    with np.errstate(divide="ignore"):
        return float(np.max(np.where(rest > 0, top / rest, np.inf)))
