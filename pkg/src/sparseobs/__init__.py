"""Recovery of sparse initial states of discrete-time LTI systems."""
from . import conditions, errors, experiments, recovery, stochastic, system_model
from .conditions import (
    fuchs_certificate,
    hautus_observable,
    kalman_observable,
    mutual_coherence,
    null_space_condition,
    rip_constant,
    unique_k_sparse,
)
from .errors import SparseObsError
from .recovery import (
    RecoveryReport,
    l0_oracle,
    l1_recover,
    prony_recover,
    reduced_l1_recover,
    subspace_pursuit,
    svd_reduce,
)
from .system_model import (
    JordanSpec,
    LtiSystem,
    ObservationSchedule,
    SparseVector,
    make_diagonal_system,
    make_jordan_system,
    observability_matrix,
    simulate_outputs,
)

__version__ = "0.1.0"

__all__ = [
    "JordanSpec",
    "LtiSystem",
    "ObservationSchedule",
    "RecoveryReport",
    "SparseObsError",
    "SparseVector",
    "conditions",
    "errors",
    "experiments",
    "fuchs_certificate",
    "hautus_observable",
    "kalman_observable",
    "l0_oracle",
    "l1_recover",
    "make_diagonal_system",
    "make_jordan_system",
    "mutual_coherence",
    "null_space_condition",
    "observability_matrix",
    "prony_recover",
    "recovery",
    "reduced_l1_recover",
    "rip_constant",
    "simulate_outputs",
    "stochastic",
    "subspace_pursuit",
    "svd_reduce",
    "unique_k_sparse",
]
