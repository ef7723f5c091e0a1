"""Command-line entry point for sparse initial-state recovery.

Subcommands::

    simulate   outputs y of a system JSON for a state x0 at given times
    recover    estimate x0 from a system JSON and an output CSV
    check      recoverability condition records for O_T B
    phase      phase-transition sweep (config kind PhaseTransition)
    adaptive   collect-until-condition protocol (kind AdaptiveCollect)
    sweep      any experiment kind named in the config

Exit codes: 0 success, 2 bad input or config, 3 solver error, 4 size
guard exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import conditions
from .errors import ConfigError, InputError, SparseObsError
from .experiments import (
    RUNNERS,
    ExperimentConfig,
    ExperimentKind,
    ExperimentResult,
    run_phase_transition,
)
from .recovery import l0_oracle, l1_recover, prony_recover, subspace_pursuit
from .system_model import ObservationSchedule, load_system, observability_matrix, simulate_outputs

CONDITIONS = ("coherence", "rip", "nullspace", "unique", "hautus", "kalman")


def _floats(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()], dtype=float)
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of numbers") from None


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of integers") from None


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _system(args):
    try:
        sys_, sched = load_system(args.system)
    except OSError as exc:
        raise InputError(f"cannot read {args.system}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.system} is not valid JSON: {exc}") from None
    if getattr(args, "times", None):
        sched = ObservationSchedule(_ints(args.times, "--times"))
    return sys_, sched


def _read_outputs(path) -> tuple[tuple[int, ...] | None, np.ndarray]:
    """Read an output CSV with a ``y`` column and optional ``t`` column.

    Rows sharing a time are consecutive output channels of that time, as
    written by ``simulate``.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or "y" not in rows[0]:
        raise InputError(f"{path} needs a header with a 'y' column")
    try:
        y = np.array([float(r["y"]) for r in rows])
        times = None
        if "t" in rows[0]:
            times = tuple(dict.fromkeys(int(r["t"]) for r in rows))
    except (TypeError, ValueError):
        raise InputError(f"{path} holds a non-numeric entry") from None
    return times, y


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(kind: str, columns, rows, summary=None) -> ExperimentResult:
    res = ExperimentResult(kind, list(columns))
    for r in rows:
        res.add(*r)
    res.summary.update(summary or {})
    return res


def cmd_simulate(args) -> ExperimentResult:
    sys_, sched = _system(args)
    if sched is None:
        raise InputError("no observation times: give --times or a 'times' key")
    x0 = _floats(args.x0, "--x0")
    y = simulate_outputs(sys_, x0, sched).reshape(sched.m, sys_.d_y)
    rows = [(t, j, float(y[i, j])) for i, t in enumerate(sched.times) for j in range(sys_.d_y)]
    return _table("simulate", ("t", "channel", "y"), rows)


def _prony(sys_, sched, y, K):
    A = sys_.A
    if sys_.d_y != 1 or np.count_nonzero(A - np.diag(np.diag(A))):
        raise InputError("prony needs a diagonal A and a single output")
    if not np.array_equal(sys_.B, np.eye(sys_.n)):
        raise InputError("prony works in the coordinates of x0 (B must be the identity)")
    t = np.asarray(sched.times)
    if np.any(np.diff(t) != 1):
        raise InputError("prony needs consecutive observation times")
    return prony_recover(np.diag(A), sys_.C[0], y, K, t0=int(t[0]))


def cmd_recover(args) -> ExperimentResult:
    sys_, sched = _system(args)
    times, y = _read_outputs(args.y)
    if times is not None and not args.times:
        sched = ObservationSchedule(times)
    if sched is None:
        raise InputError("no observation times: give --times, a 't' column or a 'times' key")
    Phi = observability_matrix(sys_, sched) @ sys_.B
    if y.size != Phi.shape[0]:
        raise InputError(f"{y.size} outputs for {Phi.shape[0]} rows of O_T")
    method, K = args.method, args.K
    if method in ("sp", "l0", "prony") and K is None:
        raise InputError(f"method {method} needs --K")
    if method == "l1":
        rep = l1_recover(Phi, y, basis=sys_.B)
    elif method == "sp":
        rep = subspace_pursuit(Phi, y, K, basis=sys_.B)
    elif method == "l0":
        rep = l0_oracle(Phi, y, K, basis=sys_.B)
    else:
        rep = _prony(sys_, sched, y, K)
    x0 = rep.x0
    rows = [(i, float(x0[i])) for i in range(x0.size)]
    summary = {k: v for k, v in rep.to_dict().items() if k != "x0"}
    return _table("recover", ("index", "x0"), rows, summary)


def cmd_check(args) -> ExperimentResult:
    sys_, sched = _system(args)
    wanted = CONDITIONS if args.condition == "all" else (args.condition,)
    needs_phi = any(c in ("coherence", "rip", "nullspace", "unique") for c in wanted)
    if needs_phi and sched is None:
        raise InputError("no observation times: give --times or a 'times' key")
    if needs_phi and args.K is None:
        raise InputError("conditions on O_T B need --K")
    Phi = observability_matrix(sys_, sched) @ sys_.B if needs_phi else None
    K = args.K
    records = []
    for name in wanted:
        if name == "coherence":
            records.append(conditions.mutual_coherence(Phi).to_record(K))
        elif name == "rip":
            records.append(conditions.rip_constant(Phi, K).to_record())
        elif name == "nullspace":
            records.append(conditions.null_space_condition(Phi, K).to_record())
        elif name == "unique":
            holds = conditions.unique_k_sparse(Phi, K)
            records.append(conditions.condition_record("unique_k_sparse", K, None, holds))
        elif name == "hautus":
            records.append(conditions.hautus_observable(sys_.A, sys_.C).to_record())
        else:
            holds = conditions.kalman_observable(sys_.A, sys_.C)
            records.append(conditions.condition_record("kalman", None, None, holds))
    rows = [(r["condition"], "" if r["K"] is None else r["K"],
             "" if r["value"] is None else r["value"], r["holds"]) for r in records]
    res = _table("check", ("condition", "K", "value", "holds"), rows)
    res.summary["records"] = records
    return res


def _config(args, kind: ExperimentKind | None) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("--config is required")
    d = _read_json(args.config)
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    if kind is not None:
        d.setdefault("kind", kind.value)
        if d["kind"] != kind.value:
            raise ConfigError(f"config kind {d['kind']!r} does not match this subcommand ({kind.value})")
    try:
        cfg = ExperimentConfig.from_dict(d)
        if args.seed is not None:
            cfg = cfg.replace(seed=args.seed)
        if getattr(args, "method", None):
            cfg = cfg.replace(method=args.method)
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    if args.out is None and cfg.out:
        args.out = cfg.out
    return cfg


def cmd_phase(args) -> ExperimentResult:
    return run_phase_transition(_config(args, ExperimentKind.PHASE_TRANSITION), jobs=args.jobs)


def cmd_adaptive(args) -> ExperimentResult:
    cfg = _config(args, ExperimentKind.ADAPTIVE_COLLECT)
    return RUNNERS[cfg.kind](cfg)


def cmd_sweep(args) -> ExperimentResult:
    cfg = _config(args, None)
    return RUNNERS[cfg.kind](cfg)


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be an integer") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparseobs", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="command", required=True)

    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--system", required=True, help="system JSON {A, C, B?, times?}")
    system.add_argument("--times", default=None, help="comma-separated observation times")

    s = sub.add_parser("simulate", parents=[common, system], help="simulate outputs")
    s.add_argument("--x0", required=True, help="comma-separated initial state")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("recover", parents=[common, system], help="recover x0 from outputs")
    s.add_argument("--y", required=True, help="output CSV with a 'y' column (as written by simulate)")
    s.add_argument("--K", type=int, default=None, help="sparsity level")
    s.add_argument("--method", choices=("l1", "sp", "prony", "l0"), default="l1")
    s.set_defaults(func=cmd_recover)

    s = sub.add_parser("check", parents=[common, system], help="evaluate recoverability conditions")
    s.add_argument("--K", type=int, default=None, help="sparsity level")
    s.add_argument("--condition", choices=CONDITIONS + ("all",), default="coherence")
    s.set_defaults(func=cmd_check)

    experiment = argparse.ArgumentParser(add_help=False)
    experiment.add_argument("--config", required=True, help="experiment config JSON")
    experiment.add_argument("--seed", type=_seed, default=None, help="override the config seed")

    s = sub.add_parser("phase", parents=[common, experiment], help="phase-transition sweep")
    s.add_argument("--method", choices=("l1", "sp"), default=None)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.set_defaults(func=cmd_phase)

    s = sub.add_parser("adaptive", parents=[common, experiment], help="adaptive collection protocol")
    s.set_defaults(func=cmd_adaptive)

    s = sub.add_parser("sweep", parents=[common, experiment], help="run the experiment named in the config")
    s.add_argument("--method", choices=("l1", "sp", "prony", "l0"), default=None)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
        _emit(result.render(args.format), args.out)
    except SparseObsError as exc:
        print(f"sparseobs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"sparseobs: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
