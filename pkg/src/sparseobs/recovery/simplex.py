"""Revised two-phase simplex for  min c'x  s.t.  Aeq x = beq, x >= 0.

The lowest eligible index enters. The leaving row comes from a Harris
ratio test: the step is bounded with a small feasibility slack and the
largest pivot within that bound leaves, which keeps the basis well
conditioned. After a run of zero-step pivots the lowest basic index
among exact ratio ties leaves instead (Bland's rule), which rules out
cycling; basic values within round-off of zero count as zero so that
degenerate rows tie exactly. A pivot that would leave a numerically
singular or primal-infeasible basis is passed over. The basis
matrix is refactored from the original data at every iteration instead
of updating a tableau, so round-off does not accumulate across pivots.
The problems solved here have at most a few dozen rows, which keeps
the dense LU cheap.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import Infeasible, InputError, MaxPivotsExceeded, SolverError, Unbounded

PRESOLVE_TOL = 1e-10
PIVOT_TOL = 1e-9
COST_TOL = 1e-9
SINGULAR_TOL = 1e-13
DEGENERATE_TOL = 1e-9
PRIMAL_TOL = 1e-8


@dataclass(frozen=True)
class LPSolution:
    x: np.ndarray
    objective: float
    pivots: int
    basis: tuple[int, ...]
    dropped_rows: tuple[int, ...]


def _presolve(A: np.ndarray) -> np.ndarray:
    """Indices of rows to keep: zero rows and dependent rows are dropped."""
    scale = np.max(np.abs(A), axis=1)
    nonzero = scale > PRESOLVE_TOL * max(1.0, float(scale.max(initial=0.0)))
    keep = np.flatnonzero(nonzero)
    if keep.size == 0:
        return keep
    # rank-revealing QR on the kept rows
    Ak = A[keep] / scale[keep, None]
    _, R, perm = scipy.linalg.qr(Ak.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > PRESOLVE_TOL * max(1.0, float(diag[0]))))
    return np.sort(keep[perm[:rank]])


def _factor(Bm: np.ndarray):
    """LU of a basis matrix, or None when it is numerically singular."""
    with warnings.catch_warnings():
        # singularity is detected below; scipy's warning adds nothing
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(Bm, check_finite=False)
    d = np.abs(np.diag(lu))
    if d.min() <= SINGULAR_TOL * d.max():
        return None
    return lu, piv


def _iterate(M, b, cost, basis, allowed, max_pivots, pivots, phase):
    """Pivots until optimal; ``basis`` is updated in place.

    ``allowed`` masks the columns that may enter. A pivot is taken only
    if the new basis is numerically nonsingular and its basic solution
    stays feasible to ``PRIMAL_TOL``; otherwise the next leaving row or
    entering column is tried, so ill-conditioned data cannot drive the
    iteration into a meaningless basis. If refused pivots could still
    lower the objective beyond round-off, phase 2 raises instead of
    reporting a non-optimal basis; phase 1 returns and its caller judges
    the objective.
    """
    lu = _factor(M[:, basis])
    if lu is None:
        raise SolverError("starting basis is numerically singular")
    xB = scipy.linalg.lu_solve(lu, b)
    stalled = 0  # consecutive zero-step pivots
    while True:
        refused_gain = 0.0  # objective decrease forgone by refused pivots
        slack = DEGENERATE_TOL * max(1.0, float(np.max(np.abs(xB))))
        level = np.where(xB <= slack, 0.0, xB)
        duals = scipy.linalg.lu_solve(lu, cost[basis], trans=1)
        reduced = cost - M.T @ duals
        reduced[basis] = 0.0
        eligible = np.flatnonzero(allowed & (reduced < -COST_TOL))
        moved = False
        for col in eligible:
            col = int(col)
            u = scipy.linalg.lu_solve(lu, M[:, col])
            pos = np.flatnonzero(u > PIVOT_TOL * max(1.0, float(np.max(np.abs(u)))))
            if pos.size == 0:
                if phase == 1:  # the phase-1 objective is bounded below by zero
                    continue
                raise Unbounded(f"objective unbounded along column {col}")
            ratios = level[pos] / u[pos]
            if stalled < len(basis):
                # Harris: bound the step with slack, then prefer large pivots
                bound = np.min((level[pos] + slack) / u[pos])
                rows = sorted(pos[ratios <= bound], key=lambda i: (-u[i], basis[i]))
            else:
                ties = pos[ratios <= ratios.min() + 1e-12 * (1.0 + ratios.min())]
                rows = sorted(ties, key=lambda i: basis[i])
            for row in rows:
                row = int(row)
                trial = list(basis)
                trial[row] = col
                new_lu = _factor(M[:, trial])
                if new_lu is None:
                    continue
                new_x = scipy.linalg.lu_solve(new_lu, b)
                if new_x.min() < -PRIMAL_TOL * max(1.0, float(np.max(np.abs(new_x)))):
                    continue
                if pivots >= max_pivots:
                    raise MaxPivotsExceeded(f"simplex exceeded {max_pivots} pivots")
                stalled = stalled + 1 if level[row] == 0.0 else 0
                basis[row] = col
                lu, xB = new_lu, new_x
                pivots += 1
                moved = True
                break
            if moved:
                break
            refused_gain = max(refused_gain, -float(reduced[col]) * float(ratios.min()))
        if not moved:
            objective = abs(float(cost[basis] @ xB))
            if phase == 2 and refused_gain > COST_TOL * (1.0 + objective):
                raise SolverError("no numerically acceptable pivot improves the objective")
            return pivots, xB


def simplex_solve(c, Aeq, beq, max_pivots: int | None = None) -> LPSolution:
    c = np.asarray(c, dtype=float).ravel()
    A = np.atleast_2d(np.asarray(Aeq, dtype=float))
    b = np.asarray(beq, dtype=float).ravel()
    q, p = A.shape
    if c.size != p or b.size != q:
        raise InputError(f"LP shapes disagree: c {c.shape}, Aeq {A.shape}, beq {b.shape}")
    if max_pivots is None:
        max_pivots = 50 * (p + q)

    kept = _presolve(A)
    dropped = tuple(int(i) for i in np.setdiff1d(np.arange(q), kept))
    if kept.size == 0:
        if np.max(np.abs(b), initial=0.0) > 1e-8 * (1.0 + np.max(np.abs(b), initial=0.0)):
            raise Infeasible("all constraint rows vanish but the right-hand side does not")
        x = np.zeros(p)
        if np.any(c < 0):
            raise Unbounded("unconstrained problem with a negative cost")
        return LPSolution(x, 0.0, 0, (), dropped)
    Ak, bk = A[kept], b[kept]
    rscale = np.max(np.abs(Ak), axis=1)
    Ak, bk = Ak / rscale[:, None], bk / rscale
    neg = bk < 0
    Ak[neg] *= -1.0
    bk[neg] *= -1.0
    r = kept.size

    # phase 1: artificial identity columns, minimise their sum
    M = np.hstack([Ak, np.eye(r)])
    cost1 = np.concatenate([np.zeros(p), np.ones(r)])
    basis = list(range(p, p + r))
    allowed = np.ones(p + r, dtype=bool)
    pivots, xB = _iterate(M, bk, cost1, basis, allowed, max_pivots, 0, phase=1)
    if float(cost1[basis] @ xB) > 1e-9 * (1.0 + float(bk.sum())):
        raise Infeasible(f"phase 1 optimum {float(cost1[basis] @ xB):.3e} is positive")

    # swap zero-level artificials for original columns (degenerate pivots);
    # one left at round-off level moves the other basics by level / pivot,
    # so the largest pivot that keeps them feasible is preferred
    for i in range(r):
        if basis[i] < p:
            continue
        lu = _factor(M[:, basis])
        if lu is None:
            raise SolverError("phase 1 ended on a numerically singular basis")
        rowv = np.abs(scipy.linalg.lu_solve(lu, np.eye(r)[i], trans=1) @ Ak)
        rowv[[j for j in basis if j < p]] = 0.0
        chosen, least_bad = None, -np.inf
        for j in np.argsort(-rowv, kind="stable"):
            if rowv[j] <= PIVOT_TOL:
                break
            trial = list(basis)
            trial[i] = int(j)
            trial_lu = _factor(M[:, trial])
            if trial_lu is None:
                continue
            xt = scipy.linalg.lu_solve(trial_lu, bk)
            worst = float(xt.min()) / max(1.0, float(np.max(np.abs(xt))))
            if worst > least_bad:
                chosen, least_bad = int(j), worst
            if worst >= -PRIMAL_TOL:
                break
        if chosen is None:
            raise SolverError("an artificial variable could not leave a full-rank basis")
        basis[i] = chosen
        pivots += 1

    # phase 2 on the original columns
    cost2 = np.concatenate([c, np.zeros(r)])
    allowed[p:] = False
    pivots, xB = _iterate(M, bk, cost2, basis, allowed, max_pivots, pivots, phase=2)

    x = np.zeros(p)
    x[basis] = np.maximum(xB, 0.0)
    scale = 1.0 + np.max(np.abs(b), initial=0.0) + np.max(np.abs(A), initial=0.0) * np.max(x, initial=0.0)
    if np.max(np.abs(A @ x - b), initial=0.0) > 1e-8 * scale:
        raise Infeasible("equality residual exceeds tolerance at the optimal basis")
    return LPSolution(x, float(c @ x), pivots, tuple(basis), dropped)


def lp_simplex(c, Aeq, beq, max_pivots: int | None = None) -> np.ndarray:
    """Optimal basic feasible solution of min c'x, Aeq x = beq, x >= 0."""
    return simplex_solve(c, Aeq, beq, max_pivots).x
