import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseobs.conditions import (
    fuchs_certificate,
    hautus_observable,
    kalman_observable,
    mutual_coherence,
    null_space_condition,
    rip_constant,
    unique_k_sparse,
)
from sparseobs.errors import DuplicateEigenvalue, SizeGuardExceeded, ZeroColumn
from sparseobs.recovery import l1_recover_normalized
from sparseobs.system_model import (
    JordanSpec,
    ObservationSchedule,
    make_diagonal_system,
    make_jordan_system,
    observability_matrix,
)

from oracles import exhaustive_l1, grid_ratio, power_iteration_extremes

# ---- coherence ----

def test_coherence_identity():
    res = mutual_coherence(np.eye(4))
    assert res.M == 0.0 and math.isinf(res.sparsity_bound) and res.admits(3)


def test_coherence_two_columns():
    res = mutual_coherence(np.array([[1.0, 1.0], [0.0, 1.0]]) / [1.0, math.sqrt(2)])
    assert res.M == pytest.approx(1 / math.sqrt(2))
    assert res.sparsity_bound == pytest.approx(0.5 * (1 + math.sqrt(2)))
    assert res.admits(1) and not res.admits(2)


def test_coherence_vandermonde_exhaustive():
    O = observability_matrix(make_diagonal_system([0.5, 1.0, 1.5], [1, 1, 1]), ObservationSchedule((0, 1, 2)))
    res = mutual_coherence(O)
    k_max = int(min(math.floor(res.sparsity_bound), 3))
    assert k_max >= 1
    for k in range(1, k_max + 1):
        assert exhaustive_l1(O, k, l1_recover_normalized)


def test_coherence_zero_column():
    with pytest.raises(ZeroColumn):
        mutual_coherence([[1.0, 0.0], [2.0, 0.0]])


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_coherence_soundness_random(seed):
    rng = np.random.default_rng(seed)
    Phi = rng.normal(size=(int(rng.integers(3, 6)), 6))
    res = mutual_coherence(Phi)
    if res.admits(1):
        assert exhaustive_l1(Phi, 1, l1_recover_normalized)


# ---- RIP ----

def test_rip_identity_zero():
    for K in range(1, 5):
        assert rip_constant(np.eye(6), K).delta_K == 0.0


def test_rip_duplicated_column():
    Phi = np.eye(4)[:, [0, 1, 1, 2]]
    res = rip_constant(Phi, 2)
    assert res.delta_K == pytest.approx(1.0, abs=1e-12)
    assert res.argmax_support == (1, 2)


def test_rip_matches_power_iteration():
    rng = np.random.default_rng(8)
    Phi = rng.normal(size=(8, 16))
    Phi /= np.linalg.norm(Phi, axis=0)
    G = Phi.T @ Phi
    oracle = 0.0
    for I in combinations(range(16), 2):
        lo, hi = power_iteration_extremes(G[np.ix_(I, I)], rng, iters=400, restarts=1)
        oracle = max(oracle, hi - 1.0, 1.0 - lo)
    assert rip_constant(Phi, 2).delta_K == pytest.approx(oracle, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_rip_monotone_and_coherence_bridge(seed):
    rng = np.random.default_rng(seed)
    Phi = rng.normal(size=(5, 9))
    Phi /= np.linalg.norm(Phi, axis=0)
    deltas = [rip_constant(Phi, K).delta_K for K in range(1, 5)]
    assert all(b >= a - 1e-12 for a, b in zip(deltas, deltas[1:]))
    assert deltas[1] >= mutual_coherence(Phi).M - 1e-12


def test_rip_guard():
    with pytest.raises(SizeGuardExceeded):
        rip_constant(np.eye(25), 2)
    with pytest.raises(SizeGuardExceeded):
        rip_constant(np.eye(10), 6)


# ---- null-space condition ----

def test_nsc_full_column_rank():
    res = null_space_condition(np.random.default_rng(0).normal(size=(5, 4)), 2)
    assert res.holds and math.isinf(res.worst_c)


def test_nsc_two_equal_columns():
    res = null_space_condition(np.array([[1.0, 1.0]]), 1)
    assert res.worst_c == 1.0 and not res.holds
    w, T = res.witness
    assert len(T) == 1


def test_nsc_null_vector_inside_T():
    Phi = np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0], [0.0, 0.0, 1.0, -1.0]])
    res = null_space_condition(Phi, 2)
    assert res.worst_c == 0.0 and not res.holds


def test_nsc_implies_exhaustive_recovery():
    found = 0
    for seed in range(40):
        Phi = np.random.default_rng(seed).normal(size=(4, 6))
        if null_space_condition(Phi, 1).holds:
            found += 1
            assert exhaustive_l1(Phi, 1)
    assert found > 0


@pytest.mark.parametrize("seed", range(12))
def test_nsc_matches_grid_scan(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(4, 9))
    d = int(rng.integers(1, 3))
    K = int(rng.integers(1, 3))
    Phi = rng.normal(size=(n - d, n))
    res = null_space_condition(Phi, K)
    ratio = grid_ratio(Phi, K)
    assert res.holds == (ratio < 1.0)
    assert 1.0 / res.worst_c == pytest.approx(ratio, rel=1e-3)


def test_nsc_guard():
    with pytest.raises(SizeGuardExceeded):
        null_space_condition(np.ones((2, 21)), 1)
    with pytest.raises(SizeGuardExceeded):
        null_space_condition(np.ones((2, 10)), 4)


# ---- Hautus / Kalman ----

def test_hautus_examples():
    assert hautus_observable(np.diag([1.0, 2.0]), [[1.0, 1.0]]).observable
    res = hautus_observable(np.diag([1.0, 2.0]), [[1.0, 0.0]])
    assert not res.observable and res.witness == pytest.approx(2.0)
    J = make_jordan_system(JordanSpec(((0.7, 2),)), [1.0, 0.0]).A
    assert not hautus_observable(J, [[0.0, 1.0]]).observable
    assert hautus_observable(J, [[1.0, 0.0]]).observable


def test_hautus_complex_eigenvalues():
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert hautus_observable(R, [[1.0, 0.0]]).observable
    A = np.block([[R, np.zeros((2, 1))], [np.zeros((1, 2)), np.ones((1, 1))]])
    res = hautus_observable(A, [[0.0, 0.0, 1.0]])
    assert not res.observable and abs(res.witness.imag) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), hide=st.booleans())
def test_hautus_agrees_with_kalman(seed, hide):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    D = np.diag(rng.uniform(-2, 2, n))
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    C = rng.normal(size=(1, n))
    if hide:
        C[0, 0] = 0.0  # mode 0 becomes invisible
    A, C = Q @ D @ Q.T, C @ Q.T
    assert bool(hautus_observable(A, C)) == kalman_observable(A, C)


# ---- uniqueness ----

def test_unique_k_sparse_examples():
    nodes = np.array([0.4, 0.9, 1.3, 1.7, 2.0, 2.4])
    for K in (1, 2, 3):
        V = nodes[None, :] ** np.arange(2 * K)[:, None]
        assert unique_k_sparse(V, K)
    assert not unique_k_sparse(np.eye(4)[:, [0, 1, 1, 2]], 1)
    assert unique_k_sparse(np.eye(6), 3)
    with pytest.raises(SizeGuardExceeded):
        unique_k_sparse(np.eye(25), 1)


# ---- Fuchs certificate ----

def test_fuchs_single_support():
    lam = np.array([0.5, 1.1, 1.7, 2.0])
    cert = fuchs_certificate(lam, [1], 3)
    assert cert.inner[1] == pytest.approx(1.0, abs=1e-14)
    off = [0, 2, 3]
    assert np.allclose(cert.inner[off], 1.0 - (lam[1] - lam[off]) ** 2, atol=1e-13)
    assert cert.valid


def test_fuchs_minimal_length_and_padding():
    lam = np.linspace(0.3, 2.2, 9)
    cert = fuchs_certificate(lam, [2, 6], 5)
    assert cert.f.size == 5 and cert.f[-1] != 0.0 and cert.valid
    padded = fuchs_certificate(lam, [2, 6], 9)
    assert np.all(padded.f[5:] == 0.0) and padded.valid


def test_fuchs_duplicate_eigenvalue():
    with pytest.raises(DuplicateEigenvalue):
        fuchs_certificate([1.0, 1.0, 2.0], [0], 3)
