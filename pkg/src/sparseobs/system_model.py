"""Discrete-time LTI systems with zero input, observed at selected times.

    x_{t+1} = A x_t,    y_t = C x_t   for t in the observation schedule.

Stacking C A^{t_i} over the schedule gives the observability matrix O
with y = O x0. The initial state is assumed sparse in an orthonormal
basis B (x0 = B s), B = I by default.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateEigenvalue,
    InputError,
    InvalidSchedule,
    NonSquare,
    NotOrthonormal,
    ZeroEigenvalue,
    ZeroLeadingEntry,
    ZeroObservationEntry,
)

ORTHONORMAL_TOL = 1e-10


def _frozen(a, ndim: int | None = None) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise DimensionMismatch(f"expected a {ndim}-D array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SparseVector:
    """Vector of dimension ``dim`` stored as sorted (index, value) pairs.

    Only nonzero values are stored, so ``k`` is the l0 count.
    """

    dim: int
    indices: tuple[int, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.dim < 1:
            raise InputError("dim must be positive")
        if len(self.indices) != len(self.values):
            raise InputError("indices and values differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise InputError("indices must be strictly increasing")
        if self.indices and not (0 <= self.indices[0] and self.indices[-1] < self.dim):
            raise InputError("index out of range")
        if any(v == 0.0 for v in self.values):
            raise InputError("stored values must be nonzero")

    @classmethod
    def from_dense(cls, x, tol: float = 0.0) -> "SparseVector":
        """Keep entries with ``|x_i| > tol``."""
        x = np.asarray(x, dtype=float).ravel()
        idx = np.flatnonzero(np.abs(x) > tol)
        return cls(x.size, tuple(int(i) for i in idx), tuple(float(x[i]) for i in idx))

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[tuple[int, float]]) -> "SparseVector":
        pairs = sorted((int(i), float(v)) for i, v in entries if v != 0.0)
        return cls(dim, tuple(i for i, _ in pairs), tuple(v for _, v in pairs))

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def support(self) -> tuple[int, ...]:
        return self.indices

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices, self.values))

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.dim)
        if self.indices:
            x[list(self.indices)] = self.values
        return x


@dataclass(frozen=True)
class ObservationSchedule:
    """Strictly increasing nonnegative observation times."""

    times: tuple[int, ...]

    def __post_init__(self):
        times = tuple(int(t) for t in self.times)
        if any(t != s for t, s in zip(times, self.times)):
            raise InvalidSchedule("times must be integers")
        object.__setattr__(self, "times", times)
        if not times:
            raise InvalidSchedule("a schedule needs at least one time")
        if times[0] < 0:
            raise InvalidSchedule("times must be nonnegative")
        if any(b <= a for a, b in zip(times, times[1:])):
            # duplicates and disorder are rejected, never repaired
            raise InvalidSchedule(f"times must be strictly increasing: {times}")

    @classmethod
    def successive(cls, m: int, start: int = 0) -> "ObservationSchedule":
        return cls(tuple(range(start, start + m)))

    @property
    def m(self) -> int:
        return len(self.times)

    def __len__(self) -> int:
        return len(self.times)

    def prefix(self, m: int) -> "ObservationSchedule":
        return ObservationSchedule(self.times[:m])


@dataclass(frozen=True)
class JordanSpec:
    """Jordan structure as (eigenvalue, block size) pairs."""

    blocks: tuple[tuple[float, int], ...]

    def __post_init__(self):
        blocks = tuple((float(lam), int(size)) for lam, size in self.blocks)
        if not blocks:
            raise InputError("at least one Jordan block is required")
        if any(size < 1 for _, size in blocks):
            raise InputError("block sizes must be positive")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(size for _, size in self.blocks)

    @property
    def leading_indices(self) -> list[int]:
        starts, pos = [], 0
        for _, size in self.blocks:
            starts.append(pos)
            pos += size
        return starts


@dataclass(frozen=True)
class LtiSystem:
    A: np.ndarray
    C: np.ndarray
    B: np.ndarray = field(default=None)

    def __post_init__(self):
        A = _frozen(self.A, 2)
        C = np.array(self.C, dtype=float)
        if C.ndim == 1:
            C = C[None, :]
        C = _frozen(C, 2)
        if A.shape[0] != A.shape[1]:
            raise NonSquare(f"A must be square, got {A.shape}")
        n = A.shape[0]
        if n < 1 or C.shape[0] < 1:
            raise DimensionMismatch("n and d_y must be at least 1")
        if C.shape[1] != n:
            raise DimensionMismatch(f"C has {C.shape[1]} columns, A is {n}x{n}")
        B = np.eye(n) if self.B is None else np.array(self.B, dtype=float)
        if B.shape != (n, n):
            raise DimensionMismatch(f"B must be {n}x{n}, got {B.shape}")
        if np.linalg.norm(B.T @ B - np.eye(n)) > ORTHONORMAL_TOL:
            raise NotOrthonormal("basis B must have orthonormal columns")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "B", _frozen(B))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d_y(self) -> int:
        return self.C.shape[0]


def _check_distinct(lambdas: np.ndarray) -> None:
    s = np.sort(lambdas)
    if np.any(np.diff(s) == 0.0):
        raise DuplicateEigenvalue("eigenvalues must be distinct")


def make_diagonal_system(lambdas, c, distinct: bool = False) -> LtiSystem:
    """A = diag(lambdas), single output row C = c, B = I.

    With distinct nonzero eigenvalues and nonzero c this is the
    Vandermonde setting where 2K+1 observations identify a K-sparse x0.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    if lam.size != c.size:
        raise DimensionMismatch("lambdas and c must have equal length")
    if np.any(lam == 0.0):
        raise ZeroEigenvalue(f"zero eigenvalue at index {int(np.flatnonzero(lam == 0.0)[0])}")
    if np.any(c == 0.0):
        raise ZeroObservationEntry(f"zero entry of C at index {int(np.flatnonzero(c == 0.0)[0])}")
    if distinct:
        _check_distinct(lam)
    return LtiSystem(np.diag(lam), c[None, :])


def jordan_matrix(spec: JordanSpec) -> np.ndarray:
    A = np.zeros((spec.n, spec.n))
    for start, (lam, size) in zip(spec.leading_indices, spec.blocks):
        for k in range(size):
            A[start + k, start + k] = lam
            if k + 1 < size:
                A[start + k, start + k + 1] = 1.0
    return A


def make_jordan_system(spec: JordanSpec, c, distinct: bool = False) -> LtiSystem:
    """Block-diagonal Jordan A with single output row C = c.

    Each block's leading entry of c must be nonzero, otherwise that block
    is unobservable. ``distinct=True`` additionally requires distinct,
    nonzero eigenvalues across blocks.
    """
    c = np.asarray(c, dtype=float).ravel()
    if c.size != spec.n:
        raise DimensionMismatch(f"c has length {c.size}, Jordan structure has n={spec.n}")
    for block, start in enumerate(spec.leading_indices):
        if c[start] == 0.0:
            raise ZeroLeadingEntry(f"block {block} has zero leading entry at index {start}")
    if distinct:
        lam = np.array([lam for lam, _ in spec.blocks])
        if np.any(lam == 0.0):
            raise ZeroEigenvalue("Jordan eigenvalues must be nonzero")
        _check_distinct(lam)
    return LtiSystem(jordan_matrix(spec), c[None, :])


def matrix_power(A, t: int) -> np.ndarray:
    """A**t by binary exponentiation; A**0 = I."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSquare(f"matrix_power needs a square matrix, got shape {A.shape}")
    t = int(t)
    if t < 0:
        raise InputError("exponent must be nonnegative")
    result = np.eye(A.shape[0])
    base = A.copy()
    while t:
        if t & 1:
            result = result @ base
        t >>= 1
        if t:
            base = base @ base
    return result


def schedule_powers(A, times: Sequence[int]) -> list[np.ndarray]:
    """A**t for each t of an increasing time list, walking gap by gap."""
    A = np.asarray(A, dtype=float)
    powers, current, prev = [], np.eye(A.shape[0]), 0
    for t in times:
        current = matrix_power(A, t - prev) @ current
        powers.append(current)
        prev = t
    return powers


def observability_matrix(sys: LtiSystem, sched: ObservationSchedule) -> np.ndarray:
    """Stack C A^{t_i} over the schedule, in schedule order: (m*d_y) x n."""
    blocks = [sys.C @ P for P in schedule_powers(sys.A, sched.times)]
    return np.vstack(blocks)


def simulate_outputs(sys: LtiSystem, x0, sched: ObservationSchedule) -> np.ndarray:
    """Propagate x0 and record C x_t at each scheduled time, stacked."""
    if isinstance(x0, SparseVector):
        if x0.dim != sys.n:
            raise DimensionMismatch(f"x0 has dimension {x0.dim}, system has n={sys.n}")
        x = x0.to_dense()
    else:
        x = np.asarray(x0, dtype=float).ravel()
        if x.size != sys.n:
            raise DimensionMismatch(f"x0 has dimension {x.size}, system has n={sys.n}")
    out, prev = [], 0
    for t in sched.times:
        x = matrix_power(sys.A, t - prev) @ x
        out.append(sys.C @ x)
        prev = t
    return np.concatenate(out)


def system_to_dict(sys: LtiSystem, sched: ObservationSchedule | None = None) -> dict:
    d = {"A": sys.A.tolist(), "C": sys.C.tolist()}
    if not np.array_equal(sys.B, np.eye(sys.n)):
        d["B"] = sys.B.tolist()
    if sched is not None:
        d["times"] = list(sched.times)
    return d


def system_from_dict(d: dict) -> tuple[LtiSystem, ObservationSchedule | None]:
    try:
        sys = LtiSystem(d["A"], d["C"], d.get("B"))
    except KeyError as exc:
        raise InputError(f"system description lacks key {exc}") from None
    times = d.get("times")
    return sys, (ObservationSchedule(tuple(times)) if times is not None else None)


def dump_system(path, sys: LtiSystem, sched: ObservationSchedule | None = None) -> None:
    Path(path).write_text(json.dumps(system_to_dict(sys, sched), indent=2) + "\n")


def load_system(path) -> tuple[LtiSystem, ObservationSchedule | None]:
    return system_from_dict(json.loads(Path(path).read_text()))
