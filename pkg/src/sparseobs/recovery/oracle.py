from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DimensionMismatch, NoSparseSolution, SizeGuardExceeded
from .report import Method, RecoveryReport, make_report

MAX_N = 24
MAX_K = 4


def l0_oracle(Phi, y, Kmax: int, basis=None) -> RecoveryReport:
    """Sparsest consistent solution by exhaustive support search.

    Supports are tried by increasing size and, within a size, in
    lexicographic order; the first whose least-squares residual is at
    most 1e-8 (1 + ||y||_2) wins. Refuses to run beyond n = 24 or
    Kmax = 4.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    m, n = Phi.shape
    if y.size != m:
        raise DimensionMismatch(f"y has length {y.size}, Phi has {m} rows")
    if n > MAX_N or Kmax > MAX_K:
        raise SizeGuardExceeded(f"l0 oracle limited to n <= {MAX_N}, Kmax <= {MAX_K}")
    tol = 1e-8 * (1.0 + float(np.linalg.norm(y)))
    if np.linalg.norm(y) <= tol:
        return make_report(Method.L0_ORACLE, Phi, y, np.zeros(n), basis, k=0, supports_tried=1)

    tried = 1
    for k in range(1, min(Kmax, n) + 1):
        for support in combinations(range(n), k):
            tried += 1
            cols = list(support)
            coef, *_ = np.linalg.lstsq(Phi[:, cols], y, rcond=None)
            if np.linalg.norm(Phi[:, cols] @ coef - y) <= tol:
                s = np.zeros(n)
                s[cols] = coef
                return make_report(Method.L0_ORACLE, Phi, y, s, basis, k=k, supports_tried=tried)
    raise NoSparseSolution(f"no solution with at most {Kmax} nonzeros")
