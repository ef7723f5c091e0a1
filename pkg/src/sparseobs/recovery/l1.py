from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, Infeasible, SolverError, Unbounded, ZeroColumn
from .report import Method, RecoveryReport, make_report, truncate
from .simplex import simplex_solve


def l1_recover(Phi, y, basis=None, max_pivots: int | None = None) -> RecoveryReport:
    """Minimise ||s||_1 subject to Phi s = y as an exact LP.

    The split s = s+ - s- with s+, s- >= 0 turns the problem into
    min sum(s+ + s-) s.t. [Phi, -Phi][s+; s-] = y, solved by the simplex
    back-end. Row scaling is applied first; it leaves the minimiser
    unchanged, and so is dividing y by its largest entry (the minimiser
    scales with y), which keeps the solver's absolute tolerances
    meaningful for tiny or huge observations. If ``basis`` is given the
    report's x0 is basis @ s.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    m, n = Phi.shape
    if y.size != m:
        raise DimensionMismatch(f"y has length {y.size}, Phi has {m} rows")
    if not np.any(y):
        return make_report(Method.L1, Phi, y, np.zeros(n), basis, lp_pivots=0)

    rnorm = np.max(np.abs(Phi), axis=1)
    zero_rows = rnorm == 0.0
    if np.any(np.abs(y[zero_rows]) > 0.0):
        raise Infeasible("nonzero observation on an all-zero row of Phi")
    rows = ~zero_rows
    A = Phi[rows] / rnorm[rows, None]
    b = y[rows] / rnorm[rows]
    bscale = float(np.max(np.abs(b)))
    try:
        sol = simplex_solve(np.ones(2 * n), np.hstack([A, -A]), b / bscale, max_pivots)
    except Unbounded as exc:  # impossible: the objective is bounded below by 0
        raise SolverError(f"internal error, l1 LP reported unbounded: {exc}") from exc
    s = truncate(sol.x[:n] - sol.x[n:]) * bscale
    return make_report(
        Method.L1, Phi, y, s, basis,
        lp_pivots=sol.pivots,
        lp_objective=sol.objective * bscale,
        dropped_rows=len(sol.dropped_rows),
    )


def l1_recover_normalized(Phi, y, basis=None, max_pivots: int | None = None) -> RecoveryReport:
    """l1 over the column-normalized Phi, reported on the original scale.

    Minimises sum_i ||Phi_i||_2 |s_i|, the weighting under which the
    mutual-coherence guarantee (stated for unit-norm columns) applies to
    Phi itself.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    norms = np.linalg.norm(Phi, axis=0)
    if np.any(norms == 0.0):
        raise ZeroColumn(f"column {int(np.flatnonzero(norms == 0.0)[0])} of Phi is zero")
    rep = l1_recover(Phi / norms, y, max_pivots=max_pivots)
    s = rep.estimate.to_dense() / norms
    return make_report(Method.L1, Phi, y, s, basis, column_normalized=True, **rep.diagnostics)
