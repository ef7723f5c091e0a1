"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to:
2 for bad input or configuration, 3 for solver failures, 4 when a
combinatorial size guard refuses to run.
"""


class SparseObsError(Exception):
    exit_code = 3


class InputError(SparseObsError, ValueError):
    exit_code = 2


class ConfigError(InputError):
    pass


class ZeroEigenvalue(InputError):
    pass


class ZeroObservationEntry(InputError):
    pass


class DuplicateEigenvalue(InputError):
    pass


class ZeroLeadingEntry(InputError):
    pass


class NonSquare(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class InvalidSchedule(InputError):
    pass


class NotOrthonormal(InputError):
    pass


class ZeroColumn(InputError):
    pass


class SolverError(SparseObsError, ArithmeticError):
    exit_code = 3


class Infeasible(SolverError):
    pass


class Unbounded(SolverError):
    pass


class MaxPivotsExceeded(SolverError):
    pass


class RootMatchFailure(SolverError):
    pass


class NoSparseSolution(SolverError):
    pass


class ZeroMatrix(SolverError):
    pass


class EigenFailure(SolverError):
    pass


class RankDeficientDraw(SolverError):
    pass


class DegenerateSpectrum(SolverError):
    pass


class SizeGuardExceeded(SparseObsError):
    exit_code = 4
