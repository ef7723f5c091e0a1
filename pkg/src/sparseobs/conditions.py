"""Checks of the recoverability conditions for a measurement matrix Phi.

Brute-force checkers (RIP, null space, 2K-column uniqueness) enumerate
supports and are therefore guarded by hard size limits; exceeding one
raises :class:`SizeGuardExceeded`.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import (
    DuplicateEigenvalue,
    EigenFailure,
    InputError,
    NonSquare,
    SizeGuardExceeded,
    Unbounded,
    ZeroColumn,
)
from .recovery.reduce import numerical_rank
from .recovery.simplex import simplex_solve

RIP_MAX_N, RIP_MAX_K = 24, 5
NSC_MAX_N, NSC_MAX_K = 20, 3
NSC_RATIO_SNAP = 1e-9
SPARK_MAX_N, SPARK_MAX_K = 24, 4
_CHUNK = 4096


def condition_record(condition: str, K, value, holds: bool, witness=None) -> dict:
    """JSON-ready record shared by every checker."""
    if isinstance(value, float) and math.isinf(value):
        value = "inf"
    return {"condition": condition, "K": K, "value": value, "holds": bool(holds), "witness": witness}


def _normalized_columns(Phi: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(Phi, axis=0)
    if np.any(norms == 0.0):
        raise ZeroColumn(f"column {int(np.flatnonzero(norms == 0.0)[0])} is zero")
    return Phi / norms


@dataclass(frozen=True)
class CoherenceResult:
    M: float
    sparsity_bound: float
    pair: tuple[int, int] | None

    def admits(self, K: int) -> bool:
        """True when K <= (1 + 1/M)/2 with M < 1."""
        return self.M < 1.0 and K <= self.sparsity_bound

    def to_record(self, K: int | None = None) -> dict:
        holds = self.M < 1.0 if K is None else self.admits(K)
        return condition_record("coherence", K, self.M, holds,
                                {"pair": list(self.pair) if self.pair else None,
                                 "sparsity_bound": "inf" if math.isinf(self.sparsity_bound) else self.sparsity_bound})


def mutual_coherence(Phi) -> CoherenceResult:
    """Largest |<phi_i, phi_j>| over distinct unit-normalised columns."""
    Psi = _normalized_columns(np.atleast_2d(np.asarray(Phi, dtype=float)))
    n = Psi.shape[1]
    if n < 2:
        return CoherenceResult(0.0, math.inf, None)
    G = np.abs(Psi.T @ Psi)
    np.fill_diagonal(G, -1.0)
    flat = int(np.argmax(G))
    i, j = divmod(flat, n)
    M = float(min(G[i, j], 1.0))
    bound = math.inf if M == 0.0 else 0.5 * (1.0 + 1.0 / M)
    return CoherenceResult(M, bound, (min(i, j), max(i, j)) if M > 0.0 else None)


@dataclass(frozen=True)
class RipResult:
    K: int
    delta_K: float
    argmax_support: tuple[int, ...]

    @property
    def within_unit(self) -> bool:
        return self.delta_K <= 1.0

    def to_record(self) -> dict:
        return condition_record("rip", self.K, self.delta_K, self.delta_K < 1.0,
                                {"support": list(self.argmax_support)})


def _supports(n: int, k: int):
    it = combinations(range(n), k)
    while True:
        block = np.array(list(_take(it, _CHUNK)), dtype=int).reshape(-1, k)
        if block.size == 0:
            return
        yield block


def _take(it, count):
    for _ in range(count):
        try:
            yield next(it)
        except StopIteration:
            return


def rip_constant(Phi, K: int) -> RipResult:
    """Exact restricted isometry constant delta_K by support enumeration.

    By eigenvalue interlacing the extreme eigenvalues of sub-Gram matrices
    can only spread when columns are added, so the supports of size
    exactly min(K, n) already attain the maximum over |I| <= K.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    n = Phi.shape[1]
    if n > RIP_MAX_N or K > RIP_MAX_K:
        raise SizeGuardExceeded(f"rip_constant limited to n <= {RIP_MAX_N}, K <= {RIP_MAX_K}")
    if K < 1:
        raise InputError("K must be positive")
    k = min(K, n)
    G = Phi.T @ Phi
    best, best_support = -1.0, ()
    for block in _supports(n, k):
        sub = G[block[:, :, None], block[:, None, :]]
        ev = np.linalg.eigvalsh(sub)
        dev = np.maximum(ev[:, -1] - 1.0, 1.0 - ev[:, 0])
        i = int(np.argmax(dev))
        if dev[i] > best:
            best, best_support = float(dev[i]), tuple(int(v) for v in block[i])
    return RipResult(K, max(best, 0.0), best_support)


@dataclass(frozen=True)
class NullSpaceResult:
    K: int
    holds: bool
    worst_c: float
    witness: tuple[np.ndarray, tuple[int, ...]] | None

    def to_record(self) -> dict:
        wit = None
        if self.witness is not None:
            wit = {"w": self.witness[0].tolist(), "T": list(self.witness[1])}
        return condition_record("null_space", self.K, self.worst_c, self.holds, wit)


def null_space_basis(Phi) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of Phi."""
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    _, sv, Vt = np.linalg.svd(Phi, full_matrices=True)
    r = numerical_rank(sv, Phi.shape)
    return Vt[r:].T


def _max_ratio(N: np.ndarray, T: tuple[int, ...], signs: np.ndarray):
    """max sum_T signs*(N z) subject to sum_{T^c} |N z| <= 1, as an LP."""
    n, d = N.shape
    comp = np.setdiff1d(np.arange(n), T)
    nc = comp.size
    Nc = N[comp]
    g = signs @ N[list(T)]
    # variables: z+ (d), z- (d), u (nc), slacks (2nc + 1)
    p = 2 * d + nc + 2 * nc + 1
    A = np.zeros((2 * nc + 1, p))
    A[:nc, :d], A[:nc, d:2 * d] = Nc, -Nc
    A[nc:2 * nc, :d], A[nc:2 * nc, d:2 * d] = -Nc, Nc
    A[:nc, 2 * d:2 * d + nc] = -np.eye(nc)
    A[nc:2 * nc, 2 * d:2 * d + nc] = -np.eye(nc)
    A[-1, 2 * d:2 * d + nc] = 1.0
    A[:, 2 * d + nc:] = np.eye(2 * nc + 1)
    b = np.zeros(2 * nc + 1)
    b[-1] = 1.0
    cost = np.zeros(p)
    cost[:d], cost[d:2 * d] = -g, g
    sol = simplex_solve(cost, A, b)
    z = sol.x[:d] - sol.x[d:2 * d]
    return -sol.objective, N @ z


def null_space_condition(Phi, K: int) -> NullSpaceResult:
    """Worst constant c in  c sum_T |w_i| <= sum_{T^c} |w_j|  over null vectors.

    For every |T| = K and sign pattern the ratio sum_T |w| / sum_{T^c} |w|
    is maximised by an LP over the null-space coordinates; worst_c is
    the reciprocal of the largest ratio. A null vector supported inside
    some T makes the ratio unbounded: worst_c = 0 and the condition fails.
    """
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    n = Phi.shape[1]
    if n > NSC_MAX_N or K > NSC_MAX_K:
        raise SizeGuardExceeded(f"null_space_condition limited to n <= {NSC_MAX_N}, K <= {NSC_MAX_K}")
    if not 1 <= K < n:
        raise InputError(f"K={K} must satisfy 1 <= K < n={n}")
    N = null_space_basis(Phi)
    d = N.shape[1]
    if d == 0:
        return NullSpaceResult(K, True, math.inf, None)

    worst, witness = 0.0, None
    # sign patterns come in +/- pairs with equal optimum; fix the first sign
    patterns = [np.array((1.0,) + rest) for rest in product((1.0, -1.0), repeat=K - 1)]
    for T in combinations(range(n), K):
        sub = N[np.setdiff1d(np.arange(n), T)]
        _, sv, Vt = np.linalg.svd(sub, full_matrices=True)
        if numerical_rank(sv, sub.shape) < d:
            return NullSpaceResult(K, False, 0.0, (N @ Vt[-1], T))
        for signs in patterns:
            try:
                ratio, w = _max_ratio(N, T, signs)
            except Unbounded:
                return NullSpaceResult(K, False, 0.0, (np.zeros(n), T))
            if ratio > worst:
                worst, witness = ratio, (w, T)
    if abs(worst - 1.0) <= NSC_RATIO_SNAP:
        worst = 1.0  # boundary case; LP round-off must not decide it
    worst_c = math.inf if worst == 0.0 else 1.0 / worst
    holds = worst_c > 1.0
    return NullSpaceResult(K, holds, worst_c, None if holds else witness)


@dataclass(frozen=True)
class HautusResult:
    observable: bool
    witness: complex | None

    def __bool__(self) -> bool:
        return self.observable

    def to_record(self) -> dict:
        wit = None if self.witness is None else {"re": self.witness.real, "im": self.witness.imag}
        return condition_record("hautus", None, None, self.observable, wit)


CLUSTER_RADII = (1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 3e-2, 1e-1)


def _cluster_means(eig: np.ndarray, radius: float) -> list[complex]:
    """Means of the single-linkage clusters (size >= 2) at ``radius``."""
    n = eig.size
    parent = list(range(n))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eig[i] - eig[j]) <= radius:
                parent[root(i)] = root(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    return [complex(np.mean(eig[g])) for g in groups.values() if len(g) > 1]


def hautus_observable(A, C) -> HautusResult:
    """(A, C) is observable iff [lambda I - A; C] has rank n at every eigenvalue.

    A defective eigenvalue of multiplicity k is computed only to about
    eps^(1/k), which hides the rank drop. The computed eigenvalues of
    such a block surround the true one and their mean is accurate, so
    the means of eigenvalue clusters at a ladder of radii are tested as
    well. A point that is not an eigenvalue leaves the stack at full
    rank, so the extra points cannot produce a false negative verdict.
    """
    A = np.asarray(A, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSquare(f"A must be square, got {A.shape}")
    n = A.shape[0]
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    scale = max(1.0, float(np.max(np.abs(eig), initial=0.0)))
    points = [complex(v) for v in eig]
    for radius in CLUSTER_RADII:
        for p in _cluster_means(eig, radius * scale):
            if p not in points:
                points.append(p)
    eye = np.eye(n)
    for lam in points:
        M = np.vstack([lam * eye - A, C.astype(complex)])
        sv = np.linalg.svd(M, compute_uv=False)
        if numerical_rank(sv, M.shape) < n:
            return HautusResult(False, lam)
    return HautusResult(True, None)


def kalman_observable(A, C) -> bool:
    """Rank test on the classical stack [C; CA; ...; CA^{n-1}]."""
    A = np.asarray(A, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    n = A.shape[0]
    blocks, P = [], C
    for _ in range(n):
        blocks.append(P)
        P = P @ A
    O = np.vstack(blocks)
    return numerical_rank(np.linalg.svd(O, compute_uv=False), O.shape) == n


def unique_k_sparse(Phi, K: int) -> bool:
    """True iff every 2K columns are linearly independent (spark > 2K)."""
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    m, n = Phi.shape
    if n > SPARK_MAX_N or K > SPARK_MAX_K:
        raise SizeGuardExceeded(f"unique_k_sparse limited to n <= {SPARK_MAX_N}, K <= {SPARK_MAX_K}")
    if K < 1 or 2 * K > n:
        raise InputError(f"need 1 <= K and 2K <= n, got K={K}, n={n}")
    k = 2 * K
    if m < k:
        return False
    for block in _supports(n, k):
        sub = np.transpose(Phi[:, block], (1, 0, 2))
        sv = np.linalg.svd(sub, compute_uv=False)
        if np.any(sv[:, -1] <= 1e-12 * sv[:, 0] * max(m, k)):
            return False
    return True


@dataclass(frozen=True)
class FuchsCertificate:
    """Dual vector g = e_1 - f built from P(x) = prod_k (lambda_{i_k} - x)^2."""

    g: np.ndarray
    f: np.ndarray
    inner: np.ndarray
    support: tuple[int, ...]
    valid: bool
    two_sided: bool

    def to_record(self) -> dict:
        return condition_record("fuchs", len(self.support), float(np.max(np.delete(self.inner, self.support), initial=-math.inf)),
                                self.valid, {"support": list(self.support)})


def fuchs_certificate(lambdas, support, m: int) -> FuchsCertificate:
    """Certificate that the nonnegative K-sparse solution on ``support`` is unique.

    ``valid`` checks <g, v_i> = 1 on the support and < 1 elsewhere, with
    v_i = (1, lambda_i, ..., lambda_i^{m-1}); since <f, v_i> = P(lambda_i)
    this holds whenever the lambdas are distinct. ``two_sided`` also
    checks <g, v_i> > -1 off the support, which is what a certificate for
    signed l1 recovery would additionally need.

    For close eigenvalues P(lambda_i) falls below the round-off of a
    floating-point inner product, so both flags are decided in exact
    rational arithmetic on the (exactly representable) input lambdas.
    ``g``, ``f`` and ``inner`` are the rounded values.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    support = tuple(sorted(int(i) for i in support))
    K = len(support)
    if np.any(np.diff(np.sort(lam)) == 0.0):
        raise DuplicateEigenvalue("eigenvalues must be distinct")
    if m < 2 * K + 1:
        raise InputError(f"m={m} must be at least 2K+1={2 * K + 1}")
    exact = [Fraction(float(v)) for v in lam]
    # ascending coefficients of P(x) = prod_k (x - lambda_{i_k})^2
    coef = [Fraction(1)]
    for i in support:
        a = exact[i]
        quad = (a * a, -2 * a, Fraction(1))
        prod = [Fraction(0)] * (len(coef) + 2)
        for j, cj in enumerate(coef):
            for k, qk in enumerate(quad):
                prod[j + k] += cj * qk
        coef = prod
    g_exact = [-c for c in coef] + [Fraction(0)] * (m - len(coef))
    g_exact[0] += 1
    inner_exact = []
    for v in exact:
        acc = Fraction(0)
        for c in reversed(g_exact):  # Horner
            acc = acc * v + c
        inner_exact.append(acc)
    off = [inner_exact[i] for i in range(lam.size) if i not in support]
    valid = all(inner_exact[i] == 1 for i in support) and all(v < 1 for v in off)
    two_sided = valid and all(v > -1 for v in off)
    f = np.zeros(m)
    f[:len(coef)] = [float(c) for c in coef]
    g = np.array([float(c) for c in g_exact])
    inner = np.array([float(v) for v in inner_exact])
    return FuchsCertificate(g, f, inner, support, valid, two_sided)
