"""Success rate of l1 recovery versus measurement count for random systems."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat

import numpy as np

from ..errors import ConfigError, SolverError
from ..recovery import l1_recover, subspace_pursuit, svd_reduce
from ..stochastic import make_rng, normalize_spectrum, sample_gaussian, sample_wishart_A
from ..system_model import LtiSystem, observability_matrix
from .config import ExperimentConfig, ExperimentKind
from .results import ExperimentResult
from .sampling import random_basis, schedule_for, sparse_vector
from .sweeps import is_exact


@dataclass(frozen=True)
class PhasePoint:
    m: int
    successes: int
    trials: int
    solver_errors: int = 0

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise ValueError("successes must lie in [0, trials]")

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


def default_m_values(cfg: ExperimentConfig) -> tuple[int, ...]:
    hi = min(cfg.n, 30)
    if cfg.schedule == "random":
        hi = min(hi, cfg.t_max + 1)
    return tuple(range(cfg.K, hi + 1))


def phase_trial(cfg: ExperimentConfig, m: int, trial: int) -> tuple[bool, bool]:
    """One draw at measurement count m; returns (success, solver_error).

    Draws A = H H' (spectrum rescaled per ``normalization``), Gaussian C
    (d_y rows), a K-sparse s with magnitudes in ``x_range``, x0 = B s and
    the schedule. Rows of O and y are equilibrated, then O is reduced by
    its SVD and the reduced system is solved.
    """
    rng = make_rng(cfg.seed, (m, trial))
    n = cfg.n
    A = normalize_spectrum(sample_wishart_A(n, rng), cfg.normalization)
    C = sample_gaussian(cfg.d_y, n, rng)
    B = random_basis(n, cfg.basis, rng)
    s = sparse_vector(n, cfg.K, *cfg.x_range, rng)
    sched = schedule_for(cfg.schedule, m, cfg.t_max, rng)
    x0 = B @ s
    O = observability_matrix(LtiSystem(A, C), sched)
    y = O @ x0
    scale = np.max(np.abs(O), axis=1)
    scale[scale == 0.0] = 1.0
    O, y = O / scale[:, None], y / scale
    try:
        red = svd_reduce(O, y, B)
        if cfg.method == "sp":
            rep = subspace_pursuit(red.reduced_matrix, red.reduced_rhs, min(cfg.K, red.r), basis=B)
        else:
            rep = l1_recover(red.reduced_matrix, red.reduced_rhs, basis=B)
    except SolverError:
        return False, True
    return is_exact(rep.x0, x0), False


def _count(cfg: ExperimentConfig, m: int, trials: range) -> tuple[int, int]:
    ok = errors = 0
    for trial in trials:
        success, failed = phase_trial(cfg, m, trial)
        ok += success
        errors += failed
    return ok, errors


def run_phase_transition(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Success counts per m; solver failures count as failures and are tallied.

    With ``jobs > 1`` the measurement counts are spread over worker
    processes. Each trial owns its substream and only counts are
    aggregated, so the output does not depend on ``jobs``.
    """
    if cfg.method not in ("l1", "sp"):
        raise ConfigError("phase transition supports method l1 or sp")
    if jobs < 1:
        raise ConfigError("jobs must be positive")
    ms = cfg.m_values or default_m_values(cfg)
    res = ExperimentResult(
        ExperimentKind.PHASE_TRANSITION.value,
        ["m", "successes", "trials", "rate", "solver_errors"],
    )
    trials = range(cfg.trials)
    if jobs == 1:
        counts = [_count(cfg, m, trials) for m in ms]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_count, repeat(cfg), ms, repeat(trials)))
    points = []
    for m, (ok, errors) in zip(ms, counts):
        pt = PhasePoint(m, ok, cfg.trials, errors)
        points.append(pt)
        res.add(pt.m, pt.successes, pt.trials, pt.success_rate, pt.solver_errors)
    res.summary["points"] = [(p.m, p.successes, p.trials) for p in points]
    return res


def phase_points(result: ExperimentResult) -> list[PhasePoint]:
    return [PhasePoint(m, s, t, e) for m, s, t, _, e in result.rows]
