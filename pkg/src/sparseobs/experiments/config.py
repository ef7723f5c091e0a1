"""Experiment configuration: one JSON object with snake_case fields."""
from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError

MAX_T = 128


class ExperimentKind(str, enum.Enum):
    PRONY_EXACT = "PronyExact"
    L1_SIGN_ALIGNED = "L1SignAligned"
    COHERENCE_SWEEP = "CoherenceSweep"
    PHASE_TRANSITION = "PhaseTransition"
    ADAPTIVE_COLLECT = "AdaptiveCollect"
    RANK_CHECK = "RankCheck"


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one batch experiment.

    Ranges are closed intervals ``[lo, hi]``. ``schedule`` is either
    ``successive`` (times 0, 1, ...) or ``random`` (distinct times drawn
    uniformly from 0..t_max). ``m_values`` lists the measurement counts a
    sweep visits; when empty each kind picks its own default. In the
    adaptive protocol each time step is dropped with ``drop_prob``.
    """

    kind: ExperimentKind
    n: int
    K: int
    trials: int = 100
    seed: int = 0
    d_y: int = 1
    lambda_range: tuple[float, float] = (0.3, 2.2)
    c_range: tuple[float, float] = (0.5, 2.0)
    x_range: tuple[float, float] = (1.0, 2.0)
    min_gap: float = 0.01
    schedule: str = "successive"
    t_max: int = 64
    m_values: tuple[int, ...] = ()
    method: str = "l1"
    checker: str = "coherence"
    check_every: int = 1
    drop_prob: float = 0.0
    normalization: str = "centered"
    basis: str = "identity"
    system: str = "diagonal"
    cond_guard: float = 1e10
    max_redraws: int = 3
    sign_violations: int = 0
    n_min: int = 3
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if not 1 <= self.K < self.n:
            raise ConfigError(f"need 1 <= K < n, got K={self.K}, n={self.n}")
        if self.d_y < 1:
            raise ConfigError("d_y must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.schedule not in ("successive", "random"):
            raise ConfigError(f"unknown schedule policy {self.schedule!r}")
        if not 0 <= self.t_max <= MAX_T:
            raise ConfigError(f"t_max must lie in [0, {MAX_T}]")
        if self.check_every < 1:
            raise ConfigError("check_every must be positive")
        if not 0.0 <= self.drop_prob < 1.0:
            raise ConfigError("drop_prob must lie in [0, 1)")
        if self.max_redraws < 0:
            raise ConfigError("max_redraws must be nonnegative")
        if not 0 <= self.sign_violations <= self.K:
            raise ConfigError("sign_violations must lie in [0, K]")
        if self.min_gap < 0:
            raise ConfigError("min_gap must be nonnegative")
        for name in ("lambda_range", "c_range", "x_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ConfigError(f"{name} must satisfy 0 < lo <= hi")
        if any(m < 1 for m in self.m_values):
            raise ConfigError("m_values must be positive")
        if self.schedule == "random" and any(m > self.t_max + 1 for m in self.m_values):
            raise ConfigError("cannot draw more distinct times than t_max + 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        for key in ("kind", "n", "K"):
            if key not in d:
                raise ConfigError(f"config lacks required field {key!r}")
        kw = dict(d)
        try:
            kw["kind"] = ExperimentKind(d["kind"])
        except ValueError:
            raise ConfigError(f"unknown experiment kind {d['kind']!r}") from None
        try:
            for key in ("lambda_range", "c_range", "x_range"):
                if key in kw:
                    lo, hi = kw[key]
                    kw[key] = (float(lo), float(hi))
            if "m_values" in kw:
                kw["m_values"] = tuple(int(m) for m in kw["m_values"])
            for key in ("n", "K", "trials", "seed", "d_y", "t_max", "check_every",
                        "max_redraws", "sign_violations", "n_min"):
                if key in kw:
                    if isinstance(kw[key], bool) or int(kw[key]) != kw[key]:
                        raise ConfigError(f"{key} must be an integer")
                    kw[key] = int(kw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from None
        return cls(**kw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["kind"] = self.kind.value
        for key in ("lambda_range", "c_range", "x_range", "m_values"):
            d[key] = list(d[key])
        return d

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return ExperimentConfig.from_dict(d)
