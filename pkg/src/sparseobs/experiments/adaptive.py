"""Collect observations until a recoverability condition holds, then solve.

Observations arrive at t = 0, 1, ..., t_max; under a drop process each
one is available independently with probability 1 - drop_prob. After
every ``check_every`` new observations the chosen condition is
evaluated on Phi = O_T B at sparsity level K. RIP is not offered here
because its cost grows combinatorially; it remains available offline.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..conditions import (
    NSC_MAX_K,
    NSC_MAX_N,
    mutual_coherence,
    null_space_condition,
)
from ..errors import InputError, SizeGuardExceeded, SolverError, ZeroColumn
from ..recovery import RecoveryReport, l1_recover, l1_recover_normalized, numerical_rank
from ..stochastic import make_rng, normalize_spectrum, sample_gaussian, sample_wishart_A
from ..system_model import (
    LtiSystem,
    ObservationSchedule,
    make_diagonal_system,
    make_jordan_system,
)
from .config import MAX_T, ExperimentConfig, ExperimentKind
from .results import ExperimentResult
from .sampling import distinct_values, random_basis, random_jordan_spec, signed_uniform, sparse_vector
from .sweeps import is_exact, relative_error

CONDITION_NEVER_MET = "ConditionNeverMet"


class Checker(str, enum.Enum):
    COHERENCE = "coherence"
    NULL_SPACE = "nullspace"
    RANK_ONLY = "rank"


@dataclass(frozen=True)
class AdaptiveResult:
    schedule: ObservationSchedule | None
    report: RecoveryReport | None
    condition_met: bool
    checks: int
    status: str

    @property
    def m(self) -> int:
        return 0 if self.schedule is None else self.schedule.m


def condition_holds(Phi: np.ndarray, K: int, checker: Checker) -> bool:
    if checker is Checker.RANK_ONLY:
        sv = np.linalg.svd(Phi, compute_uv=False)
        return numerical_rank(sv, Phi.shape) == Phi.shape[1]
    if checker is Checker.COHERENCE:
        try:
            return mutual_coherence(Phi).admits(K)
        except ZeroColumn:
            return False
    # the condition forces every 2K columns to be independent
    if Phi.shape[0] < 2 * K:
        return False
    return null_space_condition(Phi, K).holds


def _recover(Phi, y, B, checker: Checker) -> RecoveryReport:
    # the coherence guarantee is for unit columns, the others for Phi itself
    if checker is Checker.COHERENCE:
        return l1_recover_normalized(Phi, y, basis=B)
    return l1_recover(Phi, y, basis=B)


def adaptive_collect(sys: LtiSystem, x0, checker, K: int, t_max: int,
                     check_every: int = 1, drop_prob: float = 0.0, rng=None) -> AdaptiveResult:
    """Run the collect-until-condition protocol on one system and state.

    Returns the stopping schedule and the l1 report. When the condition
    never holds up to ``t_max`` the result carries a best-effort recovery
    from every collected observation and status ``ConditionNeverMet``.
    """
    checker = Checker(checker)
    n = sys.n
    if not 0 <= t_max <= MAX_T:
        raise SizeGuardExceeded(f"t_max must lie in [0, {MAX_T}]")
    if checker is Checker.NULL_SPACE and (n > NSC_MAX_N or K > NSC_MAX_K):
        raise SizeGuardExceeded(f"null-space checker limited to n <= {NSC_MAX_N}, K <= {NSC_MAX_K}")
    if check_every < 1:
        raise InputError("check_every must be positive")
    if drop_prob > 0.0 and rng is None:
        raise InputError("a drop process needs an rng")
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != n:
        raise InputError(f"x0 has dimension {x.size}, system has n={n}")
    A, C, B = sys.A, sys.C, sys.B

    power = np.eye(n)
    times, rows, ys = [], [], []
    checks, pending = 0, 0
    for t in range(t_max + 1):
        if t:
            power = A @ power
        if drop_prob > 0.0 and rng.random() < drop_prob:
            continue
        times.append(t)
        rows.append(C @ power)
        ys.append(C @ (power @ x))
        pending += 1
        if pending < check_every:
            continue
        pending = 0
        checks += 1
        O = np.vstack(rows)
        Phi = O @ B
        if condition_holds(Phi, K, checker):
            rep = _recover(Phi, np.concatenate(ys), B, checker)
            return AdaptiveResult(ObservationSchedule(tuple(times)), rep, True, checks, "ok")

    if not times:
        return AdaptiveResult(None, None, False, checks, CONDITION_NEVER_MET)
    O = np.vstack(rows)
    try:
        rep = _recover(O @ B, np.concatenate(ys), B, checker)
    except SolverError:
        rep = None
    return AdaptiveResult(ObservationSchedule(tuple(times)), rep, False, checks, CONDITION_NEVER_MET)


def random_system(cfg: ExperimentConfig, rng) -> LtiSystem:
    """System for one adaptive trial (``system`` = diagonal | jordan | wishart)."""
    n = cfg.n
    if cfg.system == "wishart":
        A = normalize_spectrum(sample_wishart_A(n, rng), cfg.normalization)
        return LtiSystem(A, sample_gaussian(cfg.d_y, n, rng), random_basis(n, cfg.basis, rng))
    lam = distinct_values(n, *cfg.lambda_range, cfg.min_gap, rng)
    c = signed_uniform(n, *cfg.c_range, rng)
    if cfg.system == "jordan":
        base = make_jordan_system(random_jordan_spec(lam, rng), c, distinct=True)
    elif cfg.system == "diagonal":
        base = make_diagonal_system(lam, c, distinct=True)
    else:
        raise InputError(f"unknown system family {cfg.system!r}")
    return LtiSystem(base.A, base.C, random_basis(n, cfg.basis, rng))


def run_adaptive(cfg: ExperimentConfig) -> ExperimentResult:
    """Adaptive protocol over ``trials`` random systems and K-sparse states."""
    checker = Checker(cfg.checker)
    res = ExperimentResult(
        ExperimentKind.ADAPTIVE_COLLECT.value,
        ["trial", "stop_m", "checks", "condition_met", "exact", "rel_err", "status"],
    )
    met = exact_count = 0
    for trial in range(cfg.trials):
        rng = make_rng(cfg.seed, trial)
        sys = random_system(cfg, rng)
        s = sparse_vector(cfg.n, cfg.K, *cfg.x_range, rng)
        x0 = sys.B @ s
        out = adaptive_collect(sys, x0, checker, cfg.K, cfg.t_max, cfg.check_every, cfg.drop_prob, rng)
        if out.report is None:
            ok, rel = False, float("inf")
        else:
            ok, rel = is_exact(out.report.x0, x0), relative_error(out.report.x0, x0)
        met += out.condition_met
        exact_count += ok
        res.add(trial, out.m, out.checks, out.condition_met, ok, rel, out.status)
    res.summary.update(trials=cfg.trials, condition_met=met, successes=exact_count)
    return res
