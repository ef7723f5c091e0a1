from .greedy import subspace_pursuit
from .l1 import l1_recover, l1_recover_normalized
from .oracle import l0_oracle
from .prony import hankel_condition, prony_recover
from .reduce import ReducedSystem, numerical_rank, reduced_l1_recover, svd_reduce
from .report import Method, RecoveryReport, feasibility_tol
from .simplex import LPSolution, lp_simplex, simplex_solve

__all__ = [
    "LPSolution",
    "Method",
    "RecoveryReport",
    "ReducedSystem",
    "feasibility_tol",
    "hankel_condition",
    "l0_oracle",
    "l1_recover",
    "l1_recover_normalized",
    "lp_simplex",
    "numerical_rank",
    "prony_recover",
    "reduced_l1_recover",
    "simplex_solve",
    "subspace_pursuit",
    "svd_reduce",
]
