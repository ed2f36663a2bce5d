"""Command-line entry point.

Verbs:
  run     execute an experiment described by a JSON config file
  sweep   single-point regularization study
  report  rebuild tables and figures strictly from cached solver runs
  dump    emit plotter-agnostic data files for one figure family

Exit code 0 on success.  Failures print one machine-readable JSON
object on stderr and exit nonzero.  The solver-run cache directory
defaults to ~/.cache/enserr and honors the ENSERR_CACHE variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (EnsembleTooSmallError, ExperimentConfig,
                      dump_figure_data, run_experiment, run_scalar_sweep)


def _load_config(path: str, overrides: dict) -> ExperimentConfig:
    d = json.loads(Path(path).read_text())
    d.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(d)


def _cmd_run(args) -> int:
    config = _load_config(args.config, {"out_dir": args.out})
    manifest = run_experiment(config, use_cache=not args.no_cache)
    print(json.dumps({"status": "ok", "out_dir": manifest.out_dir,
                      "config_hash": manifest.config_hash,
                      "runs": len(manifest.runs),
                      "excluded": [e["scheme"] for e in manifest.excluded],
                      "artifacts": len(manifest.artifacts)}))
    return 0


def _cmd_report(args) -> int:
    config = _load_config(args.config, {"out_dir": args.out})
    manifest = run_experiment(config, require_cached=True)
    print(json.dumps({"status": "ok", "out_dir": manifest.out_dir,
                      "config_hash": manifest.config_hash,
                      "artifacts": len(manifest.artifacts)}))
    return 0


def _cmd_sweep(args) -> int:
    errors = tuple(float(v) for v in args.true_errors.split(","))
    alphas = None
    if args.alpha_min is not None:
        import numpy as np
        alphas = np.logspace(args.alpha_min, args.alpha_max, args.alpha_count)
    summary = run_scalar_sweep(errors, alphas, out_dir=args.out,
                               figures=not args.no_figures)
    print(json.dumps({"status": "ok", "out_dir": args.out,
                      "plateau_variation": summary["plateau_variation"],
                      "shift_min": summary["shift_min"],
                      "shift_max": summary["shift_max"],
                      "files": summary["files"]}))
    return 0


def _cmd_dump(args) -> int:
    config = _load_config(args.config, {})
    files = dump_figure_data(config, args.kind, scheme=args.scheme,
                             ensemble=args.ensemble, variable=args.variable,
                             out_dir=args.out)
    print(json.dumps({"status": "ok",
                      "files": [str(p) for p in files]}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="enserr",
        description="Ensemble-based discretization-error estimation for "
                    "shock-interference flows.")
    sub = p.add_subparsers(dest="verb", required=True)

    pr = sub.add_parser("run", help="run an experiment from a JSON config")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", default=None, help="override output directory")
    pr.add_argument("--no-cache", action="store_true",
                    help="ignore and do not touch the solver-run cache")
    pr.set_defaults(func=_cmd_run)

    pp = sub.add_parser("report",
                        help="rebuild tables/figures from cached runs only")
    pp.add_argument("--config", required=True)
    pp.add_argument("--out", default=None)
    pp.set_defaults(func=_cmd_report)

    ps = sub.add_parser("sweep", help="scalar regularization sweep")
    ps.add_argument("--true-errors", default="1,-2,3",
                    help="comma-separated true errors (default 1,-2,3)")
    ps.add_argument("--alpha-min", type=float, default=None,
                    help="log10 of the smallest alpha")
    ps.add_argument("--alpha-max", type=float, default=0.0,
                    help="log10 of the largest alpha")
    ps.add_argument("--alpha-count", type=int, default=41)
    ps.add_argument("--out", default="out-sweep")
    ps.add_argument("--no-figures", action="store_true")
    ps.set_defaults(func=_cmd_sweep)

    pd = sub.add_parser("dump", help="emit plot data files")
    pd.add_argument("--config", required=True)
    pd.add_argument("--kind", required=True,
                    choices=("isolines", "error_slice", "sweep"))
    pd.add_argument("--scheme", default=None)
    pd.add_argument("--ensemble", default="five")
    pd.add_argument("--variable", default="rho")
    pd.add_argument("--out", default=None)
    pd.set_defaults(func=_cmd_dump)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EnsembleTooSmallError, FileNotFoundError, ValueError,
            RuntimeError, json.JSONDecodeError, OSError) as exc:
        print(json.dumps({"status": "error",
                          "error_type": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
