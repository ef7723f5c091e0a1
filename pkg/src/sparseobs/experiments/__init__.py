from .adaptive import (
    CONDITION_NEVER_MET,
    AdaptiveResult,
    Checker,
    adaptive_collect,
    condition_holds,
    run_adaptive,
)
from .config import MAX_T, ExperimentConfig, ExperimentKind, load_config
from .phase import PhasePoint, default_m_values, phase_points, phase_trial, run_phase_transition
from .results import ExperimentResult, format_value
from .sweeps import (
    EXACT_RTOL,
    is_exact,
    relative_error,
    run_coherence_sweep,
    run_prop1_sweep,
    run_prop2_sweep,
    run_rank_check,
)

RUNNERS = {
    ExperimentKind.PRONY_EXACT: run_prop1_sweep,
    ExperimentKind.L1_SIGN_ALIGNED: run_prop2_sweep,
    ExperimentKind.COHERENCE_SWEEP: run_coherence_sweep,
    ExperimentKind.PHASE_TRANSITION: run_phase_transition,
    ExperimentKind.ADAPTIVE_COLLECT: run_adaptive,
    ExperimentKind.RANK_CHECK: run_rank_check,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.kind](cfg)


__all__ = [
    "CONDITION_NEVER_MET",
    "EXACT_RTOL",
    "MAX_T",
    "RUNNERS",
    "AdaptiveResult",
    "Checker",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentResult",
    "PhasePoint",
    "adaptive_collect",
    "condition_holds",
    "default_m_values",
    "format_value",
    "is_exact",
    "load_config",
    "phase_points",
    "phase_trial",
    "relative_error",
    "run_adaptive",
    "run_coherence_sweep",
    "run_experiment",
    "run_phase_transition",
    "run_prop1_sweep",
    "run_prop2_sweep",
    "run_rank_check",
]
