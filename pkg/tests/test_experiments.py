import json
from itertools import combinations, product

import numpy as np
import pytest

from sparseobs.errors import ConfigError, SizeGuardExceeded
from sparseobs.experiments import (
    CONDITION_NEVER_MET,
    ExperimentConfig,
    ExperimentKind,
    ExperimentResult,
    PhasePoint,
    adaptive_collect,
    format_value,
    is_exact,
    load_config,
    phase_points,
    relative_error,
    run_adaptive,
    run_coherence_sweep,
    run_experiment,
    run_phase_transition,
    run_prop1_sweep,
    run_prop2_sweep,
    run_rank_check,
)
from sparseobs.experiments.adaptive import random_system
from sparseobs.experiments.sampling import distinct_values, random_times, sparse_vector
from sparseobs.recovery import l1_recover, svd_reduce
from sparseobs.stochastic import make_rng, normalize_spectrum, sample_gaussian, sample_stiefel, sample_wishart_A
from sparseobs.system_model import (
    LtiSystem,
    ObservationSchedule,
    make_diagonal_system,
    observability_matrix,
)

K = ExperimentKind


def cfg(kind, **kw):
    return ExperimentConfig(kind=kind, **kw)


# ---- config ----

@pytest.mark.parametrize("bad", [
    dict(trials=0), dict(K=8), dict(K=0), dict(seed=-1), dict(seed=2**64),
    dict(schedule="weird"), dict(t_max=129), dict(drop_prob=1.0), dict(check_every=0),
    dict(lambda_range=(0.0, 1.0)), dict(m_values=(0,)),
    dict(schedule="random", t_max=4, m_values=(6,)),
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        cfg(K.PRONY_EXACT, **{"n": 8, "K": 2, **bad})


def test_config_dict_roundtrip(tmp_path):
    c = cfg(K.PHASE_TRANSITION, n=10, K=2, m_values=(3, 4), lambda_range=(0.5, 1.5))
    assert ExperimentConfig.from_dict(c.to_dict()) == c
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_dict()))
    assert load_config(path) == c


@pytest.mark.parametrize("d", [
    {"n": 5, "K": 1},
    {"kind": "Nope", "n": 5, "K": 1},
    {"kind": "PronyExact", "n": 5, "K": 1, "extra": 1},
    {"kind": "PronyExact", "n": 5.5, "K": 1},
    {"kind": "PronyExact", "n": True, "K": 1},
    {"kind": "PronyExact", "n": 5, "K": 1, "lambda_range": [1]},
    [1, 2],
])
def test_config_from_dict_errors(d):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(d)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


# ---- results ----

def test_format_value():
    assert format_value(True) == "1" and format_value(np.bool_(False)) == "0"
    assert format_value(3) == "3"
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value(float("inf")) == "inf" and format_value(float("nan")) == "nan"
    assert format_value([1, 2.5]) == "1;2.5"
    assert format_value(None) == ""
    with pytest.raises(ValueError):
        format_value("a,b")


def test_result_csv_and_json():
    res = ExperimentResult("X", ["a", "b"])
    res.add(1, 0.5)
    res.add(2, True)
    assert res.to_csv() == "a,b\n1,0.5\n2,1\n"
    assert "\r" not in res.to_csv()
    assert json.loads(res.to_json())["rows"] == [[1, 0.5], [2, True]]
    with pytest.raises(ValueError):
        res.add(1)


def test_relative_error():
    x = np.array([0.0, 2.0])
    assert relative_error(x, x) == 0.0
    assert relative_error(np.array([0.0, 2.0 + 3e-6]), x) == pytest.approx(1e-6)
    assert is_exact(np.array([0.0, 2.0 + 2e-6]), x)
    assert not is_exact(np.array([0.0, 2.0 + 4e-6]), x)


# ---- sampling ----

def test_distinct_values_and_times():
    rng = make_rng(0)
    v = distinct_values(30, 0.3, 2.2, 0.01, rng)
    assert v.min() >= 0.3 and v.max() <= 2.2
    assert np.min(np.diff(np.sort(v))) >= 0.01
    s = random_times(10, 64, rng)
    assert s.m == 10 and max(s.times) <= 64
    x = sparse_vector(12, 3, 1.0, 2.0, rng)
    assert np.count_nonzero(x) == 3 and np.all((np.abs(x[x != 0]) >= 1) & (np.abs(x[x != 0]) <= 2))


# ---- exactness sweeps ----

def test_prop1_sweep_small():
    res = run_prop1_sweep(cfg(K.PRONY_EXACT, n=12, K=3, trials=30, seed=1))
    assert res.summary["successes"] == 30 and res.summary["m"] == 7
    assert res.columns[0] == "trial" and len(res.rows) == 30


def test_prop2_sweep_and_control_arm():
    res = run_prop2_sweep(cfg(K.L1_SIGN_ALIGNED, n=10, K=2, trials=30, seed=2))
    assert res.summary["successes"] == 30
    ctrl = run_prop2_sweep(cfg(K.L1_SIGN_ALIGNED, n=10, K=2, trials=30, seed=2, sign_violations=1))
    assert set(ctrl.column("violations")) == {1}
    assert 0 <= ctrl.summary["successes"] <= 30


def test_coherence_sweep_small():
    res = run_coherence_sweep(cfg(K.COHERENCE_SWEEP, n=6, K=2, trials=25, seed=3,
                                  schedule="random", t_max=12, system="mixed"))
    assert res.summary["counterexamples"] == 0
    assert res.summary["admitted"] > 0
    for n, m, M, bound, k_max in zip(*(res.column(c) for c in ("n", "m", "coherence", "bound", "k_max"))):
        assert 3 <= n <= 6 and 2 <= m <= n
        assert k_max <= min(np.floor(bound), 2)


def test_rank_check_small():
    res = run_rank_check(cfg(K.RANK_CHECK, n=8, K=1, trials=10, seed=4))
    assert res.summary["all_full_rank"]
    assert res.column("m") == list(range(1, 9))


# ---- phase transition ----

def test_phase_point_invariants():
    p = PhasePoint(5, 3, 4)
    assert p.success_rate == 0.75
    with pytest.raises(ValueError):
        PhasePoint(5, 5, 4)


def test_phase_trivial_ends():
    c = cfg(K.PHASE_TRANSITION, n=8, K=3, trials=20, seed=5, m_values=(2, 8), t_max=16, schedule="random")
    pts = phase_points(run_phase_transition(c))
    assert pts[0].m == 2 and pts[0].success_rate == 0.0
    assert pts[1].m == 8 and pts[1].success_rate == 1.0


def test_phase_jobs_do_not_change_output():
    c = cfg(K.PHASE_TRANSITION, n=10, K=2, trials=6, seed=6, m_values=(3, 5, 7), schedule="random", t_max=20)
    assert run_phase_transition(c).to_csv() == run_phase_transition(c, jobs=2).to_csv()


def test_phase_rejects_bad_method():
    with pytest.raises(ConfigError):
        run_phase_transition(cfg(K.PHASE_TRANSITION, n=6, K=1, method="prony"))


def test_basis_invariance_matched_seeds():
    # (A, C, B, x0 = B s) and (B'AB, CB, I, s) share the matrix O B
    n, Kc = 12, 2
    for trial in range(15):
        rng = make_rng(77, trial)
        A = normalize_spectrum(sample_wishart_A(n, rng), "centered")
        C = sample_gaussian(1, n, rng)
        B = sample_stiefel(n, n, rng)
        s = sparse_vector(n, Kc, 1.0, 2.0, rng)
        sched = random_times(8, 20, rng)
        flags = []
        for sys, x0, basis in ((LtiSystem(A, C, B), B @ s, B), (LtiSystem(B.T @ A @ B, C @ B), s, np.eye(n))):
            O = observability_matrix(sys, sched)
            red = svd_reduce(O, O @ x0, basis)
            rep = l1_recover(red.reduced_matrix, red.reduced_rhs, basis=basis)
            flags.append(is_exact(rep.estimate.to_dense(), s))
        assert flags[0] == flags[1]


# ---- adaptive protocol ----

def _exhaustive_ok(Phi, k):
    n = Phi.shape[1]
    for support in combinations(range(n), k):
        for vals in product((-2.0, -1.0, 1.0, 2.0), repeat=k):
            x = np.zeros(n)
            x[list(support)] = vals
            if not is_exact(l1_recover(Phi, Phi @ x).x0, x):
                return False
    return True


def test_adaptive_rank_stops_by_n():
    sys = make_diagonal_system([0.5, 0.9, 1.3, 1.8, 2.1], np.ones(5))
    x0 = np.array([0.0, 1.0, 0.0, 0.0, -2.0])
    out = adaptive_collect(sys, x0, "rank", 2, t_max=20)
    assert out.condition_met and out.m == 5 and out.status == "ok"
    assert np.allclose(out.report.x0, x0, atol=1e-8)


def test_adaptive_coherence_stops_early():
    c = cfg(K.ADAPTIVE_COLLECT, n=8, K=1, system="diagonal")
    for trial in range(10):
        rng = make_rng(8, trial)
        sys = random_system(c, rng)
        x0 = sparse_vector(8, 1, 1.0, 2.0, rng)
        out = adaptive_collect(sys, x0, "coherence", 1, t_max=20)
        assert out.condition_met and out.m <= 3
        assert is_exact(out.report.x0, x0)


def test_adaptive_nullspace_no_later_than_exhaustive():
    c = cfg(K.ADAPTIVE_COLLECT, n=6, K=1, system="diagonal")
    for trial in range(4):
        rng = make_rng(9, trial)
        sys = random_system(c, rng)
        x0 = sparse_vector(6, 1, 1.0, 2.0, rng)
        out = adaptive_collect(sys, x0, "nullspace", 1, t_max=10)
        first = next(m for m in range(1, 12)
                     if _exhaustive_ok(observability_matrix(sys, ObservationSchedule.successive(m)), 1))
        assert out.condition_met and out.m <= first


def test_adaptive_never_met_and_guards():
    sys = make_diagonal_system([0.5, 0.9, 1.3, 1.8], np.ones(4))
    out = adaptive_collect(sys, [0.0, 1.0, 0.0, 0.0], "rank", 1, t_max=1)
    assert not out.condition_met and out.status == CONDITION_NEVER_MET and out.m == 2
    with pytest.raises(SizeGuardExceeded):
        adaptive_collect(sys, np.zeros(4), "rank", 1, t_max=129)
    big = make_diagonal_system(np.linspace(0.3, 2.2, 21), np.ones(21))
    with pytest.raises(SizeGuardExceeded):
        adaptive_collect(big, np.zeros(21), "nullspace", 1, t_max=5)


def test_adaptive_drop_process_and_cadence():
    c = cfg(K.ADAPTIVE_COLLECT, n=6, K=1, trials=5, seed=10, checker="rank",
            drop_prob=0.3, check_every=2, t_max=40)
    res = run_adaptive(c)
    assert res.summary["condition_met"] == 5 and res.summary["successes"] == 5
    assert all(m >= 6 for m in res.column("stop_m"))


def test_run_experiment_deterministic():
    c = cfg(K.COHERENCE_SWEEP, n=5, K=1, trials=8, seed=11, schedule="random", t_max=10, system="mixed")
    assert run_experiment(c).to_csv() == run_experiment(c).to_csv()
