from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, InputError, ZeroColumn
from .report import Method, RecoveryReport, feasibility_tol, make_report, truncate

RANK_TOL = 1e-10


def _top(v: np.ndarray, k: int) -> np.ndarray:
    # stable sort: ties go to the lower index
    return np.sort(np.argsort(-np.abs(v), kind="stable")[:k])


def _lstsq(Phi: np.ndarray, y: np.ndarray, cols: np.ndarray):
    sub = Phi[:, cols]
    coef, _, rank, sv = np.linalg.lstsq(sub, y, rcond=None)
    deficient = rank < cols.size or (sv.size and sv[-1] <= RANK_TOL * sv[0])
    return coef, bool(deficient)


def subspace_pursuit(Phi, y, K: int, basis=None, max_iter: int | None = None) -> RecoveryReport:
    """Subspace pursuit with a size-K support.

    Columns are normalised before correlations are taken. Each iteration
    merges the current support with the K columns most correlated with
    the residual, refits by least squares, prunes back to K and refits.
    Iteration stops once the residual norm fails to decrease, or after
    2K + 10 rounds; the best accepted iterate is returned. Singular
    least-squares fits fall back to the pseudo-inverse and are flagged in
    ``diagnostics["rank_deficient_support"]``.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    m, n = Phi.shape
    if y.size != m:
        raise DimensionMismatch(f"y has length {y.size}, Phi has {m} rows")
    if not 1 <= K <= m:
        raise InputError(f"K={K} must satisfy 1 <= K <= m={m}")
    K = min(K, n)
    norms = np.linalg.norm(Phi, axis=0)
    if np.any(norms == 0.0):
        raise ZeroColumn(f"column {int(np.flatnonzero(norms == 0.0)[0])} of Phi is zero")
    if max_iter is None:
        max_iter = 2 * K + 10
    Psi = Phi / norms
    tol = feasibility_tol(y)

    deficient = False
    support = _top(Psi.T @ y, K)
    coef, flag = _lstsq(Psi, y, support)
    deficient |= flag
    resid = y - Psi[:, support] @ coef
    history = [float(np.linalg.norm(resid))]
    iterations = 1
    while iterations < max_iter and np.max(np.abs(resid)) > tol:
        merged = np.union1d(support, _top(Psi.T @ resid, K))
        wide, flag = _lstsq(Psi, y, merged)
        deficient |= flag
        cand = merged[_top(wide, K)]
        cand_coef, flag = _lstsq(Psi, y, cand)
        deficient |= flag
        cand_resid = y - Psi[:, cand] @ cand_coef
        iterations += 1
        if np.linalg.norm(cand_resid) >= history[-1]:
            break
        support, coef, resid = cand, cand_coef, cand_resid
        history.append(float(np.linalg.norm(resid)))

    s = np.zeros(n)
    s[support] = coef / norms[support]
    s = truncate(s)
    return make_report(
        Method.SP, Phi, y, s, basis,
        iterations=iterations,
        residual_history=history,
        rank_deficient_support=deficient,
    )
