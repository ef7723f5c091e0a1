from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..system_model import SparseVector


class Method(str, enum.Enum):
    L1 = "l1"
    SP = "sp"
    PRONY = "prony"
    L0_ORACLE = "l0"


def feasibility_tol(y) -> float:
    return 1e-8 * (1.0 + float(np.max(np.abs(y), initial=0.0)))


def truncate(x, scale=None) -> np.ndarray:
    """Zero entries below 1e-8 * (1 + ||scale||_inf); scale defaults to x."""
    x = np.array(x, dtype=float)
    ref = x if scale is None else scale
    x[np.abs(x) < 1e-8 * (1.0 + float(np.max(np.abs(ref), initial=0.0)))] = 0.0
    return x


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of one recovery call.

    ``estimate`` holds the sparse coefficient vector s; ``x0`` is B s.
    """

    method: Method
    estimate: SparseVector
    x0: np.ndarray
    residual_inf: float
    exact_constraint_satisfied: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def support(self) -> tuple[int, ...]:
        return self.estimate.support

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "support": list(self.estimate.indices),
            "values": list(self.estimate.values),
            "x0": self.x0.tolist(),
            "residual_inf": self.residual_inf,
            "exact_constraint_satisfied": self.exact_constraint_satisfied,
            "diagnostics": {k: v for k, v in self.diagnostics.items() if _jsonable(v)},
        }


def _jsonable(v) -> bool:
    return isinstance(v, (int, float, str, bool, list, tuple, type(None)))


def make_report(method: Method, Phi, y, s, basis=None, **diagnostics) -> RecoveryReport:
    s = np.asarray(s, dtype=float)
    resid = float(np.max(np.abs(np.asarray(Phi) @ s - y), initial=0.0))
    x0 = s.copy() if basis is None else np.asarray(basis) @ s
    return RecoveryReport(
        method=method,
        estimate=SparseVector.from_dense(s),
        x0=x0,
        residual_inf=resid,
        exact_constraint_satisfied=resid <= feasibility_tol(y),
        diagnostics=diagnostics,
    )
