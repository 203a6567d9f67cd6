"""Command-line runner.

    fima-stable run <config.toml> [--seed N] [--out DIR] [--threads K]
    fima-stable list [--json]

Exit status: 0 all assertions pass, 1 an assertion failed, 2 configuration
error, 3 numerical failure. ``summary.json`` and the CSV files depend only on
the resolved configuration; wall-clock data goes to ``meta.json``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .experiments import REGISTRY, ConfigError, RunContext, list_experiments, resolve_config
from .frac_calc import QuadratureError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _finite(obj) -> bool:
    if isinstance(obj, float):
        return math.isfinite(obj)
    if isinstance(obj, dict):
        return all(_finite(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return all(_finite(v) for v in obj)
    return True


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_table(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _error(kind: str, status: int, message: str, out_dir: Path | None) -> int:
    record = {"status": status, "kind": kind, "message": message}
    print(json.dumps(record), file=sys.stderr)
    if out_dir is not None:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            _dump_json(record, out_dir / "error.json")
        except OSError:
            pass
    return status


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path!r} not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path!r}: {exc}") from None


def cmd_run(args) -> int:
    out_dir = Path(args.out) if args.out else None
    if os.environ.get("CI") and args.seed is None:
        return _error("config", EXIT_CONFIG, "--seed is required when CI is set", out_dir)
    if args.threads < 1:
        return _error("config", EXIT_CONFIG, "--threads must be >= 1", out_dir)
    try:
        cfg = resolve_config(load_config(args.config), args.seed, args.out)
    except ConfigError as exc:
        return _error("config", EXIT_CONFIG, str(exc), out_dir)
    out_dir = Path(cfg.output["dir"])
    info = REGISTRY[cfg.experiment]
    start = time.perf_counter()
    try:
        with np.errstate(over="ignore", under="ignore"):
            outcome = info.runner(cfg, RunContext(threads=args.threads))
    except ConfigError as exc:
        return _error("config", EXIT_CONFIG, str(exc), out_dir)
    except (QuadratureError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _error("numerical", EXIT_NUMERIC, f"{type(exc).__name__}: {exc}", out_dir)
    except ValueError as exc:
        return _error("config", EXIT_CONFIG, str(exc), out_dir)
    elapsed = time.perf_counter() - start
    if not _finite(outcome.summary):
        return _error("numerical", EXIT_NUMERIC, "non-finite value in results", out_dir)
    passed = outcome.passed
    summary = {"experiment": cfg.experiment, "anchor": info.anchor, "code_version": __version__,
               "config": cfg.as_dict(), "results": outcome.summary, "assertions": outcome.assertions,
               "passed": passed}
    out_dir.mkdir(parents=True, exist_ok=True)
    _dump_json(summary, out_dir / "summary.json")
    for name, (cols, rows) in outcome.tables.items():
        write_table(out_dir / f"{name}.csv", cols, rows)
    meta = {"runtime_seconds": elapsed, "threads": args.threads, "backend": _kernels.get_backend(),
            "python": platform.python_version(), "numpy": np.__version__, "platform": platform.platform(),
            "finished_unix": time.time()}
    _dump_json(meta, out_dir / "meta.json")
    for a in outcome.assertions:
        print(f"{'PASS' if a['passed'] else 'FAIL'}  {a['name']}")
    print(f"{cfg.experiment}: {'pass' if passed else 'FAIL'} ({elapsed:.1f} s) -> {out_dir}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_list(args) -> int:
    rows = list_experiments()
    if args.json:
        print(json.dumps(rows, indent=2))
        return EXIT_OK
    width = max(len(r["name"]) for r in rows)
    aw = max(len(r["anchor"]) for r in rows)
    for r in rows:
        print(f"{r['name']:<{width}}  {r['anchor']:<{aw}}  {r['default_runtime']:>7}  {r['description']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fima-stable", description="Run FIMA stable-process experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a TOML config")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None, help="override ensemble.master_seed")
    run.add_argument("--out", default=None, help="override output.dir")
    run.add_argument("--threads", type=int, default=1, help="worker threads for noise generation")
    run.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list experiments")
    ls.add_argument("--json", action="store_true", help="machine-readable output")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
