"""Seeded random ensembles.

Random streams
--------------
Every draw comes from a NumPy ``Generator`` over the counter-based
Philox-4x64 bit generator. The stream for trial ``i`` under master seed
``s`` is seeded with ``SeedSequence(entropy=s, spawn_key=(i,))`` (a
tuple key such as (m, i) is used where sweeps nest trials), so
streams are independent of each other and of the order in which trials
run. A stream must not be shared between concurrent trials.

Gaussian variates are produced by the Box-Muller transform on the
stream's uniform doubles: pairs (u1, u2) in [0, 1) give
``sqrt(-2 log(1 - u1)) * (cos(2 pi u2), sin(2 pi u2))``, filled row-major.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, InputError, RankDeficientDraw

UINT64_MAX = 2**64 - 1


def make_rng(master: int, stream=0) -> np.random.Generator:
    """Generator for substream ``stream`` (an int or a tuple of ints)."""
    if not 0 <= int(master) <= UINT64_MAX:
        raise InputError("master seed must fit in an unsigned 64-bit integer")
    key = (stream,) if np.isscalar(stream) else tuple(stream)
    if any(int(k) < 0 for k in key):
        raise InputError("stream indices must be nonnegative")
    seq = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def sample_gaussian(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """rows x cols i.i.d. standard normal entries via Box-Muller."""
    if rows < 1 or cols < 1:
        raise InputError("rows and cols must be positive")
    count = rows * cols
    pairs = (count + 1) // 2
    u = rng.random(2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]).ravel()
    return z[:count].reshape(rows, cols)


def _haar_qr(G: np.ndarray):
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    return Q * np.sign(d), d


def sample_stiefel(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Isotropic n x k matrix with orthonormal columns.

    QR of a Gaussian draw with the signs of diag(R) absorbed into Q, which
    makes the factorisation unique and the result Haar distributed.
    """
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got n={n}, k={k}")
    for _ in range(2):
        Q, d = _haar_qr(sample_gaussian(n, k, rng))
        if np.min(np.abs(d)) > 1e-12 * np.max(np.abs(d)):
            return Q
    raise RankDeficientDraw("Gaussian draw was rank deficient twice")


def sample_wishart_A(n: int, rng: np.random.Generator) -> np.ndarray:
    """A = H H' with H standard Gaussian n x n; distinct eigenvalues enforced."""
    if n < 1:
        raise InputError("n must be positive")
    for _ in range(2):
        H = sample_gaussian(n, n, rng)
        A = H @ H.T
        A = 0.5 * (A + A.T)
        ev = np.linalg.eigvalsh(A)
        if n == 1 or np.min(np.diff(ev)) > 1e-10:
            return A
    raise DegenerateSpectrum("Wishart draw had a repeated eigenvalue twice")


def eigen_decomposition(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthogonal eigenvectors of symmetric A.

    For A = H H' this is its Jordan normal form: diagonal, distinct
    entries, with an orthogonal transform P.
    """
    A = np.asarray(A, dtype=float)
    return np.linalg.eigh(0.5 * (A + A.T))


def normalize_spectrum(A, mode: str = "centered") -> np.ndarray:
    """Affine rescaling of a symmetric matrix that keeps its eigenvectors.

    ``none`` returns A, ``unit`` divides by the largest eigenvalue and
    ``centered`` maps the spectrum [lo, hi] onto [-1, 1]. Each map depends
    on A only through its eigenvalues, so conjugation invariance of the
    ensemble and distinctness of eigenvalues are preserved.
    """
    A = np.asarray(A, dtype=float)
    if mode == "none":
        return A.copy()
    ev = np.linalg.eigvalsh(A)
    lo, hi = float(ev[0]), float(ev[-1])
    if mode == "unit":
        return A / hi
    if mode == "centered":
        if hi == lo:
            return np.zeros_like(A)
        return (2.0 * A - (hi + lo) * np.eye(A.shape[0])) / (hi - lo)
    raise InputError(f"unknown spectrum normalisation {mode!r}")


@dataclass(frozen=True)
class IsotropyReport:
    trials: int
    n: int
    k: int
    tolerance: float
    mean_dev: float
    second_moment_dev: float
    reference_mean_dev: float
    reference_second_moment_dev: float

    @property
    def passed(self) -> bool:
        return self.mean_dev <= self.tolerance and self.second_moment_dev <= self.tolerance


def isotropy_product_check(rng: np.random.Generator, n: int, trials: int, B=None, k: int = 1) -> IsotropyReport:
    """Moment-level isotropy of C = B A for isotropic A in S_{n,k}.

    Each coordinate of a uniformly distributed unit vector has mean 0 and
    second moment 1/n. The largest deviation of the empirical moments of
    C from these values must stay below 4/sqrt(trials); the same
    statistics for A itself are returned for comparison.
    """
    if n > 32:
        raise InputError("isotropy_product_check supports n <= 32")
    B = np.eye(n) if B is None else np.asarray(B, dtype=float)
    if B.shape != (n, n) or np.linalg.norm(B.T @ B - np.eye(n)) > 1e-10:
        raise InputError("B must be an n x n orthogonal matrix")
    first_a = np.zeros((n, k))
    second_a = np.zeros((n, k))
    first_c = np.zeros((n, k))
    second_c = np.zeros((n, k))
    for _ in range(trials):
        A = sample_stiefel(n, k, rng)
        C = B @ A
        first_a += A
        second_a += A * A
        first_c += C
        second_c += C * C
    tol = 4.0 / np.sqrt(trials)
    return IsotropyReport(
        trials=trials, n=n, k=k, tolerance=tol,
        mean_dev=float(np.max(np.abs(first_c / trials))),
        second_moment_dev=float(np.max(np.abs(second_c / trials - 1.0 / n))),
        reference_mean_dev=float(np.max(np.abs(first_a / trials))),
        reference_second_moment_dev=float(np.max(np.abs(second_a / trials - 1.0 / n))),
    )
