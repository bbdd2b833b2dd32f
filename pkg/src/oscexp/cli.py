"""Command-line runner for the verification experiments.

Every subcommand accepts ``--config FILE`` (a flat JSON object whose keys are
the subcommand's long flag names with dashes or underscores), ``--seed``,
``--threads`` (0 = one per logical processor; the environment variable
OSCEXP_THREADS supplies the default) and ``--out`` (a .csv or .json path;
JSON on standard output by default).  Command-line flags override the
config file.  The exit code is 0 exactly when every gating verdict of the
run came out as expected.

Matrices are given as their packed upper triangle, comma-separated, row by
row: for k = 2, ``a11,a12,a22``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from typing import Dict, Optional

import numpy as np

from . import __version__, closedform, experiments, oscquad
from .symlin import PhaseParameters, SymmetricMatrix, packed_size

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# literal parsing


def parse_floats(text, name: str) -> list:
    """Comma-separated reals; errors name the offending position."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [s.strip() for s in str(text).split(",")]
    out = []
    for pos, item in enumerate(items, start=1):
        try:
            val = float(item)
        except (TypeError, ValueError):
            raise UsageError(f"--{name}: element {pos} ({item!r}) is not a number") from None
        if not math.isfinite(val):
            raise UsageError(f"--{name}: element {pos} ({item!r}) is not finite")
        out.append(val)
    if not out:
        raise UsageError(f"--{name}: empty list")
    return out


def parse_ints(text, name: str) -> list:
    vals = parse_floats(text, name)
    for pos, v in enumerate(vals, start=1):
        if v != int(v):
            raise UsageError(f"--{name}: element {pos} ({v!r}) is not an integer")
    return [int(v) for v in vals]


def parse_matrix(text, k: int) -> SymmetricMatrix:
    vals = parse_floats(text, "matrix")
    if len(vals) != packed_size(k):
        raise UsageError(f"--matrix: expected {packed_size(k)} packed entries for k={k}, got {len(vals)}")
    return SymmetricMatrix(k, tuple(vals))


def parse_vector(text, k: int, name: str = "b") -> tuple:
    vals = parse_floats(text, name)
    if len(vals) != k:
        raise UsageError(f"--{name}: expected {k} entries, got {len(vals)}")
    return tuple(vals)


# ---------------------------------------------------------------------------
# output


def _fmt_number(x: float) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def to_json(obj) -> str:
    """JSON with every real written to 17 significant digits."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return _fmt_number(obj)
    if isinstance(obj, complex):
        return to_json({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(experiments.CSV_COLUMNS)
    for row in rows:
        cells = []
        for col in experiments.CSV_COLUMNS:
            v = row.get(col)
            if v is None:
                cells.append("")
            elif isinstance(v, str):
                cells.append(v)
            else:
                s = _fmt_number(v)
                cells.append("" if s == "null" else s)
        writer.writerow(cells)
    return buf.getvalue()


def build_record(result: experiments.ExperimentResult, config: dict) -> dict:
    return {
        "experiment": result.experiment,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "rows": result.rows,
        "verdicts": {
            name: {"observed": v.observed, "expected": list(v.expected), "ok": v.ok, "gating": v.gating,
                   "detail": v.detail}
            for name, v in result.verdicts.items()
        },
        "version": __version__,
    }


def emit(record: dict, out: Optional[str]) -> None:
    if out and out.lower().endswith(".csv"):
        text = rows_to_csv(record["rows"])
    else:
        text = to_json(record) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# parser


COMMON_DEFAULTS = {"seed": 0, "threads": None, "tol": 1e-10, "out": None}

SUBCOMMANDS: Dict[str, dict] = {
    "eval": {"k": None, "matrix": None, "b": None, "region": "cube", "lower": None, "upper": None,
             "closed_form": False, "method": "auto"},
    "closed-form-check": {"k": "1,2,3", "trials": 200},
    "exponent-scan": {"mode": "affine", "k": 2, "p": "4,6,8", "L": 100.0, "slices": 8, "samples": 32,
                      "c1": 0.05, "c2": 0.05, "kappa": 1.0},
    "threshold-scan": {"k": 2, "p_grid": None, "cutoffs": "10,100,1000,10000"},
    "omega-decay": {"k": 2, "mode": "affine", "a11": "1e2,1e3,1e4", "samples": 50, "c1": 0.05, "c2": 0.05,
                    "kappa": 1.0},
    "weyl-check": {"k": 2, "samples": 1_000_000},
    "fourier-decay": {"shape": "box", "q": 1.5, "rmax": 1000.0, "cutoffs": None, "vertices": None, "radius": 1.0},
    "small-square-scan": {"half_width": 0.1},
}

HELP = {
    "eval": "evaluate one integral T(A, b) over a region, or its Gaussian-regularised closed form",
    "closed-form-check": "closed form against direct evaluation of the damped integral",
    "exponent-scan": "tail scaling of E|T|^p over Omega(a11) slices",
    "threshold-scan": "eigenvalue-integral convergence verdicts over growing cutoffs",
    "omega-decay": "stationary-phase decay of |T| on Omega(a11)",
    "weyl-check": "pushforward of the Gaussian matrix ensemble to eigenvalues",
    "fourier-decay": "L^q estimate of an indicator-function Fourier transform",
    "small-square-scan": "EXPLORATORY: decay of |T(tI)| over a small square at (1, 1)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscexp", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name], argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="flat JSON file of flag values (flags override it)")
        sp.add_argument("--seed", type=int, help="64-bit unsigned run seed (default 0)")
        sp.add_argument("--threads", type=int, help="worker threads, 0 = all logical processors")
        sp.add_argument("--tol", type=float, help="quadrature tolerance")
        sp.add_argument("--out", help="output path (.csv or .json); standard output if omitted")
        for key, default in opts.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(default, bool):
                sp.add_argument(flag, action="store_true", dest=key)
            else:
                sp.add_argument(flag, dest=key, help=f"default: {default}")
    return parser


def merge_config(command: str, given: dict) -> dict:
    """Defaults < config file < flags; unknown config keys are an error."""
    allowed = {**COMMON_DEFAULTS, **SUBCOMMANDS[command]}
    merged = dict(allowed)
    path = given.pop("config", None)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in data.items():
            norm = key.replace("-", "_")
            if norm not in allowed:
                raise UsageError(f"unknown config key {key!r} for {command}")
            merged[norm] = value
    merged.update(given)
    if merged["threads"] is None:
        env = os.environ.get("OSCEXP_THREADS")
        try:
            merged["threads"] = int(env) if env else 0
        except ValueError:
            raise UsageError(f"OSCEXP_THREADS={env!r} is not an integer") from None
    seed = int(merged["seed"])
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    merged["seed"] = seed
    merged["threads"] = int(merged["threads"])
    if merged["threads"] < 0:
        raise UsageError("--threads must be non-negative")
    merged["tol"] = float(merged["tol"])
    return merged


# ---------------------------------------------------------------------------
# commands


def cmd_eval(cfg: dict) -> int:
    if cfg["k"] is None:
        raise UsageError("--k is required")
    k = parse_ints(cfg["k"], "k")[0]
    if k < 1:
        raise UsageError("--k must be positive")
    A = parse_matrix(cfg["matrix"] if cfg["matrix"] is not None else ",".join(["0"] * packed_size(k)), k)
    b = parse_vector(cfg["b"] if cfg["b"] is not None else ",".join(["0"] * k), k)
    params = PhaseParameters(A, b)
    if cfg["closed_form"]:
        val = closedform.t_infinity(params)
        out = {"value": {"re": val.real, "im": val.imag}, "modulus": abs(val), "err_abs": 0.0, "n_evals": 0,
               "method": "closed_form", "converged": True}
        sys.stdout.write(to_json(out) + "\n")
        return EXIT_OK
    if cfg["region"] == "cube":
        region = oscquad.Region.unit_cube(k)
    elif cfg["region"] == "box":
        if cfg["lower"] is None or cfg["upper"] is None:
            raise UsageError("--region box needs --lower and --upper")
        region = oscquad.Region.box(parse_vector(cfg["lower"], k, "lower"), parse_vector(cfg["upper"], k, "upper"))
    else:
        raise UsageError(f"--region must be cube or box, not {cfg['region']!r}")
    budget = oscquad.QuadratureBudget.default_for(k, cfg["tol"])
    res = oscquad.t_box(params, region, budget, method=cfg["method"])
    out = {"value": {"re": res.value.real, "im": res.value.imag}, "modulus": res.modulus, "err_abs": res.err_abs,
           "n_evals": res.n_evals, "method": res.method, "converged": res.converged}
    sys.stdout.write(to_json(out) + "\n")
    return EXIT_OK if res.converged else EXIT_BUDGET


def run_experiment(command: str, cfg: dict) -> experiments.ExperimentResult:
    threads = experiments.resolve_threads(cfg["threads"])
    seed = cfg["seed"]
    if command == "closed-form-check":
        return experiments.closed_form_check(parse_ints(cfg["k"], "k"), int(cfg["trials"]), seed, threads)
    if command == "exponent-scan":
        k = parse_ints(cfg["k"], "k")[0]
        return experiments.exponent_scan(cfg["mode"], k, parse_floats(cfg["p"], "p"), float(cfg["L"]),
                                         int(cfg["slices"]), int(cfg["samples"]), seed, threads,
                                         min(cfg["tol"], 1e-11), float(cfg["c1"]), float(cfg["c2"]),
                                         float(cfg["kappa"]))
    if command == "threshold-scan":
        k = parse_ints(cfg["k"], "k")[0]
        grid = cfg["p_grid"] if cfg["p_grid"] is not None else f"{2 * k + 1.5},{2 * k + 2.5}"
        return experiments.threshold_scan(k, parse_floats(grid, "p-grid"), parse_floats(cfg["cutoffs"], "cutoffs"),
                                          seed)
    if command == "omega-decay":
        k = parse_ints(cfg["k"], "k")[0]
        return experiments.omega_decay(k, cfg["mode"], parse_floats(cfg["a11"], "a11"), int(cfg["samples"]), seed,
                                       float(cfg["c1"]), float(cfg["c2"]), float(cfg["kappa"]), threads,
                                       min(cfg["tol"], 1e-11))
    if command == "weyl-check":
        return experiments.weyl_check(parse_ints(cfg["k"], "k")[0], int(cfg["samples"]), seed)
    if command == "fourier-decay":
        cutoffs = parse_floats(cfg["cutoffs"], "cutoffs") if cfg["cutoffs"] is not None else None
        vertices = None
        if cfg["vertices"] is not None:
            flat = parse_floats(cfg["vertices"], "vertices")
            if len(flat) % 2:
                raise UsageError("--vertices needs an even number of coordinates")
            vertices = list(zip(flat[::2], flat[1::2]))
        return experiments.fourier_decay(cfg["shape"], float(cfg["q"]), float(cfg["rmax"]), cutoffs, vertices,
                                         float(cfg["radius"]))
    if command == "small-square-scan":
        return experiments.small_square_scan(half_width=float(cfg["half_width"]), tol=cfg["tol"])
    raise UsageError(f"unknown command {command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    given = {k: v for k, v in vars(args).items() if k != "command"}
    command = args.command
    try:
        cfg = merge_config(command, given)
        if command == "eval":
            return cmd_eval(cfg)
        result = run_experiment(command, cfg)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"oscexp {command}: error: {exc}\n")
    except ValueError as exc:
        parser.exit(EXIT_USAGE, f"oscexp {command}: error: {exc}\n")
    config_echo = {k: v for k, v in cfg.items() if k != "out"}
    emit(build_record(result, config_echo), cfg["out"])
    return EXIT_OK if result.all_expected else EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
