"""Annihilating-filter (Prony / Reed-Solomon style) decoding.

For A = diag(lambda) and C = c, the outputs at consecutive times are
sums of exponentials  y_t = sum_i z_i lambda_i^t  with z = diag(c) x0.
A K-sparse z is annihilated by the monic polynomial whose roots are the
active lambda_i, and its coefficients solve a Hankel system built from
2K+1 samples. Roots are snapped to the known eigenvalue grid before the
amplitudes are refitted, which restores exactness lost to round-off.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from ..errors import (
    DimensionMismatch,
    DuplicateEigenvalue,
    InputError,
    RootMatchFailure,
    ZeroEigenvalue,
    ZeroObservationEntry,
)
from .report import Method, RecoveryReport, make_report

MATCH_RTOL = 1e-4
HANKEL_RANK_TOL = 1e-12
FIT_RTOL = 1e-9


def _annihilator(h: np.ndarray, order: int) -> np.ndarray:
    """Coefficients a_0..a_{order-1} of x^order + sum a_j x^j."""
    rows = h.size - order
    H = scipy.linalg.hankel(h[:rows], h[rows - 1:rows - 1 + order]) if order else np.zeros((rows, 0))
    rhs = -h[order:order + rows]
    coef, *_ = np.linalg.lstsq(H, rhs, rcond=None)
    return coef


def _hankel_sv(h: np.ndarray, K: int) -> np.ndarray:
    return np.linalg.svd(scipy.linalg.hankel(h[:K + 1], h[K:2 * K + 1]), compute_uv=False)


def _signal_order(sv: np.ndarray, K: int) -> int:
    """Numerical rank of the (K+1)x(K+1) sample Hankel matrix."""
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > HANKEL_RANK_TOL * sv[0] * (K + 1)))


def _equilibrate(lam: np.ndarray, y: np.ndarray):
    absl = np.abs(lam)
    rho = float(np.sqrt(absl.min() * absl.max()))
    return rho, y * rho ** -np.arange(y.size, dtype=float)


def hankel_condition(lambdas, y, K: int) -> float:
    """sigma_1 / sigma_K of the sample Hankel matrix of the first 2K+1 samples.

    Large values mean the active modes are poorly separated (or fewer
    than K are active). Depends on the data only, so it can screen draws
    before decoding.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if y.size < 2 * K + 1:
        raise DimensionMismatch(f"need 2K+1={2 * K + 1} samples, got {y.size}")
    _, h = _equilibrate(lam, y)
    sv = _hankel_sv(h, K)
    return float(sv[0] / sv[K - 1]) if sv[K - 1] > 0.0 else float("inf")


def _match(roots: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    matched = []
    for root in roots:
        dist = np.abs(root - nodes) / np.abs(nodes)
        i = int(np.argmin(dist))
        if dist[i] >= MATCH_RTOL:
            raise RootMatchFailure(f"root {root:.6g} is not within {MATCH_RTOL:g} of any node")
        if i in matched:
            raise RootMatchFailure(f"two roots matched eigenvalue index {i}")
        matched.append(i)
    return np.array(sorted(matched), dtype=int)


def prony_recover(lambdas, c, y, K: int, t0: int = 0) -> RecoveryReport:
    """Recover x0 from y_t = C A^t x0, t = t0, ..., t0 + len(y) - 1.

    Needs at least 2K + 1 consecutive samples, distinct nonzero lambdas
    and nonzero c. The order of the annihilator is the numerical rank of
    the (K+1)x(K+1) Hankel matrix of the samples, so a sparsity below K
    is handled without spurious roots. ``diagnostics["hankel_condition"]``
    reports how well the active modes are separated in the data; root
    matching degrades once it passes roughly 1e11.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n = lam.size
    if c.size != n:
        raise DimensionMismatch("lambdas and c differ in length")
    if K < 1:
        raise InputError("K must be positive")
    if y.size < 2 * K + 1:
        raise DimensionMismatch(f"need 2K+1={2 * K + 1} samples, got {y.size}")
    if np.any(lam == 0.0):
        raise ZeroEigenvalue("eigenvalues must be nonzero")
    if np.any(c == 0.0):
        raise ZeroObservationEntry("entries of C must be nonzero")
    if np.any(np.diff(np.sort(lam)) == 0.0):
        raise DuplicateEigenvalue("eigenvalues must be distinct")

    times = t0 + np.arange(y.size)
    Phi = (lam[None, :] ** times[:, None]) * c[None, :]
    if not np.any(y):
        return make_report(Method.PRONY, Phi, y, np.zeros(n), order=0, hankel_condition=1.0, roots=[])

    # equilibrate the exponentials around modulus one
    rho, h = _equilibrate(lam, y)
    nodes = lam / rho

    sv = _hankel_sv(h, K)
    detected = _signal_order(sv, K)
    powers = np.arange(y.size)[:, None]
    tol = FIT_RTOL * (1.0 + float(np.max(np.abs(h))))
    # Closely spaced active modes can hide below the rank threshold, so
    # higher orders are tried until the snapped modes reproduce the data.
    failure = None
    for order in range(max(detected, 1), K + 1):
        coef = _annihilator(h, order)
        roots = np.roots(np.concatenate([[1.0], coef[::-1]]))
        try:
            matched = _match(roots, nodes)
        except RootMatchFailure as exc:
            failure = exc
            continue
        V = nodes[None, matched] ** powers
        w, *_ = np.linalg.lstsq(V, h, rcond=None)
        if np.max(np.abs(V @ w - h)) <= tol:
            break
        failure = RootMatchFailure(f"order {order} modes do not reproduce the samples")
    else:
        raise failure
    hankel_cond = float(sv[0] / sv[order - 1]) if sv[order - 1] > 0.0 else float("inf")
    z = np.zeros(n)
    z[matched] = w / lam[matched] ** t0
    zmax = np.max(np.abs(z))
    z[np.abs(z) < 1e-8 * zmax] = 0.0
    x0 = z / c
    return make_report(
        Method.PRONY, Phi, y, x0,
        order=order,
        hankel_condition=hankel_cond,
        detected_order=detected,
        roots=[float(r.real) for r in roots * rho],
    )
