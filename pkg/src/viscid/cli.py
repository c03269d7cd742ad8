"""Command line entry point.

    viscid <experiment> --config <path> [--out <dir>] [--workers N] [--plot]

Exit codes: 0 success, 1 error, 2 audit failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from viscid import __version__
from viscid.config import EXPERIMENTS, ConfigError, parse_config
from viscid.experiments import EXIT_ERROR, ExperimentError, run_experiment
from viscid.report import (
    FIT_COLUMNS,
    build_manifest,
    fit_rows,
    write_csv,
    write_manifest,
    write_plot,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="viscid", description=__doc__.split("\n\n")[0])
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="key = value config file or a manifest.json")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--workers", type=int, default=1, help="parallel runs in a nu sweep")
    p.add_argument("--plot", action="store_true", help="also write plot.svg")
    p.add_argument("--version", action="version", version=f"viscid {__version__}")
    return p


def write_outputs(cfg, result, out_dir: Path, plot: bool, wall: float) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_csv(out_dir / "results.csv", result.columns, result.rows)]
    if result.fits:
        written.append(write_csv(out_dir / "fit.csv", FIT_COLUMNS, fit_rows(result.fits)))
    if plot and result.experiment != "audit":
        nu = result.column("nu")
        series = {c: result.column(c) for c in result.columns[1:]}
        series = {k: v for k, v in series.items() if (v > 0).all()}
        if series:
            written.append(write_plot(out_dir / "plot.svg", nu, series, result.fits,
                                      title=result.experiment))
    manifest = build_manifest(cfg, result, __version__, wall)
    written.append(write_manifest(out_dir / "manifest.json", manifest))
    return written


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = parse_config(Path(args.config), experiment=args.experiment)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    start = time.perf_counter()
    try:
        result = run_experiment(cfg, workers=args.workers)
        wall = time.perf_counter() - start
        written = write_outputs(cfg, result, Path(cfg.output_dir), args.plot, wall)
    except (ExperimentError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for check in result.checks:
        print(check.line())
    for name, fit in result.fits.items():
        print(f"{name}: slope {fit.slope:.4f}, R^2 {fit.r_squared:.4f}")
    for path in written:
        print(f"wrote {path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
