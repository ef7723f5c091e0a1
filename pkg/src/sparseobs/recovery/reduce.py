"""Reduction of O x0 = y to r orthonormal equations via the SVD.

With O = U diag(sigma) V', the last entries of U'y beyond the rank carry
no information about x0; the first r give

    diag(sigma)^-1 (U'y)[:r] = V[:, :r]' x0 = V[:, :r]' B s,

an r x n system with orthonormal rows on which l1 is then run.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, Infeasible, ZeroMatrix
from .l1 import l1_recover
from .report import RecoveryReport

RANK_EPS = 1e-12


def numerical_rank(sv: np.ndarray, shape: tuple[int, int], eps: float = RANK_EPS) -> int:
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > eps * sv[0] * max(shape)))


@dataclass(frozen=True)
class ReducedSystem:
    r: int
    sigma: np.ndarray
    reduced_rhs: np.ndarray
    reduced_matrix: np.ndarray
    discarded_inf: float


def svd_reduce(O, y, B=None, eps: float = RANK_EPS) -> ReducedSystem:
    O = np.atleast_2d(np.asarray(O, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    rows, n = O.shape
    if y.size != rows:
        raise DimensionMismatch(f"y has length {y.size}, O has {rows} rows")
    B = np.eye(n) if B is None else np.asarray(B, dtype=float)
    if B.shape != (n, n):
        raise DimensionMismatch(f"B must be {n}x{n}")
    U, sv, Vt = np.linalg.svd(O, full_matrices=True)
    r = numerical_rank(sv, O.shape, eps)
    uty = U.T @ y
    ynorm = float(np.linalg.norm(y))
    if r == 0 and ynorm > 0.0:
        raise ZeroMatrix("O has numerical rank 0 but y is nonzero")
    tail = np.abs(uty[r:])
    discarded = float(tail.max(initial=0.0))
    if discarded > 1e-8 * ynorm:
        raise Infeasible(f"y has a component {discarded:.3e} outside the range of O")
    return ReducedSystem(
        r=r,
        sigma=sv[:r].copy(),
        reduced_rhs=uty[:r] / sv[:r],
        reduced_matrix=Vt[:r] @ B,
        discarded_inf=discarded,
    )


def reduced_l1_recover(O, y, B=None, eps: float = RANK_EPS) -> RecoveryReport:
    """svd_reduce followed by l1 on the reduced system; x0 = B s."""
    red = svd_reduce(O, y, B, eps)
    n = np.asarray(O).shape[1]
    Bm = np.eye(n) if B is None else np.asarray(B, dtype=float)
    if red.r == 0:
        rep = l1_recover(np.zeros((1, n)), np.zeros(1), basis=Bm)
    else:
        rep = l1_recover(red.reduced_matrix, red.reduced_rhs, basis=Bm)
    rep.diagnostics["rank"] = red.r
    return rep
