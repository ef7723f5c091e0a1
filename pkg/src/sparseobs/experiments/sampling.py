"""Random instance generators used by the experiments."""
from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..stochastic import sample_gaussian, sample_stiefel
from ..system_model import JordanSpec, ObservationSchedule


def distinct_values(n: int, lo: float, hi: float, min_gap: float, rng) -> np.ndarray:
    """n values in [lo, hi], pairwise at least ``min_gap`` apart, random order.

    Sorted uniform draws on the shortened interval are spread by the
    gap, which keeps the law uniform over admissible configurations.
    """
    slack = (hi - lo) - (n - 1) * min_gap
    if slack < 0:
        raise InputError(f"cannot fit {n} values {min_gap} apart in [{lo}, {hi}]")
    u = np.sort(rng.uniform(0.0, slack, n))
    return rng.permutation(lo + u + min_gap * np.arange(n))


def random_signs(size: int, rng) -> np.ndarray:
    return np.where(rng.random(size) < 0.5, -1.0, 1.0)


def signed_uniform(size: int, lo: float, hi: float, rng) -> np.ndarray:
    return random_signs(size, rng) * rng.uniform(lo, hi, size)


def random_support(n: int, K: int, rng) -> np.ndarray:
    return np.sort(rng.choice(n, size=K, replace=False))


def sparse_vector(n: int, K: int, lo: float, hi: float, rng, signs=None) -> np.ndarray:
    """K random spikes with magnitudes uniform in [lo, hi].

    ``signs`` (length n) fixes the sign of every potential spike; random
    signs are drawn otherwise.
    """
    support = random_support(n, K, rng)
    mags = rng.uniform(lo, hi, K)
    s = random_signs(K, rng) if signs is None else np.asarray(signs, dtype=float)[support]
    x = np.zeros(n)
    x[support] = s * mags
    return x


def random_times(m: int, t_max: int, rng) -> ObservationSchedule:
    """m distinct times drawn uniformly from 0..t_max."""
    if not 1 <= m <= t_max + 1:
        raise InputError(f"cannot draw {m} distinct times from 0..{t_max}")
    return ObservationSchedule(tuple(int(t) for t in np.sort(rng.choice(t_max + 1, size=m, replace=False))))


def schedule_for(policy: str, m: int, t_max: int, rng) -> ObservationSchedule:
    if policy == "successive":
        return ObservationSchedule.successive(m)
    return random_times(m, t_max, rng)


def random_jordan_spec(lambdas, rng, p_merge: float = 0.3) -> JordanSpec:
    """Random block structure over distinct eigenvalues.

    Walks over the n slots; each slot after the first joins the current
    block with probability ``p_merge``, so blocks get size 1 most often.
    The eigenvalue of a block is the first of its slots.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    blocks = [[float(lambdas[0]), 1]]
    for lam in lambdas[1:]:
        if rng.random() < p_merge:
            blocks[-1][1] += 1
        else:
            blocks.append([float(lam), 1])
    return JordanSpec(tuple((lam, size) for lam, size in blocks))


def random_basis(n: int, kind: str, rng) -> np.ndarray:
    if kind == "identity":
        return np.eye(n)
    if kind == "random":
        return sample_stiefel(n, n, rng)
    raise InputError(f"unknown basis kind {kind!r}")


def gaussian_row(d_y: int, n: int, rng) -> np.ndarray:
    return sample_gaussian(d_y, n, rng)
