"""Result persistence: CSV tables, a log-log SVG plot and the run manifest."""

from __future__ import annotations

import csv
import json
import math
import platform
from pathlib import Path
from typing import Sequence

import numpy as np

from viscid.analysis import RateFit

FIT_COLUMNS = ("quantity", "slope", "intercept", "r_squared")


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    return f"{float(value):.16e}"


def write_csv(path: str | Path, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    """Header plus one line per row; numbers in full-precision scientific notation."""
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} cells, header has {len(columns)}")
            writer.writerow([_cell(v) for v in row])
    return path


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path: str | Path) -> tuple[tuple[str, ...], list[tuple]]:
    with open(path, newline="") as fh:
        lines = list(csv.reader(fh))
    if not lines:
        raise ValueError(f"{path} is empty")
    columns = tuple(lines[0])
    rows = [tuple(_parse_cell(c) for c in line) for line in lines[1:] if line]
    return columns, rows


def fit_rows(fits: dict[str, RateFit]) -> list[tuple]:
    return [(name, f.slope, f.intercept, f.r_squared) for name, f in fits.items()]


# plot ---------------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def write_plot(path: str | Path, nu: Sequence[float], series: dict[str, Sequence[float]],
               fits: dict[str, RateFit] | None = None, title: str = "") -> Path:
    """Log-log scatter of each series against nu, with its fitted line if given."""
    if not series or not len(nu):
        raise ValueError("nothing to plot")
    fits = fits or {}
    W, H, pad = 640, 440, 60
    lx = np.log10(np.asarray(nu, dtype=float))
    ys = {k: np.log10(np.asarray(v, dtype=float)) for k, v in series.items()}
    all_y = np.concatenate(list(ys.values()))
    x0, x1 = lx.min(), lx.max()
    y0, y1 = all_y.min(), all_y.max()
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    mx, my = 0.05 * (x1 - x0), 0.08 * (y1 - y0)
    x0, x1, y0, y1 = x0 - mx, x1 + mx, y0 - my, y1 + my

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (W - 2 * pad)

    def py(v):
        return H - pad - (v - y0) / (y1 - y0) * (H - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{W - 2 * pad}" height="{H - 2 * pad}" '
        'fill="none" stroke="black"/>',
        f'<text x="{W / 2:.1f}" y="{H - 15}" text-anchor="middle">log10 nu</text>',
        f'<text x="15" y="{H / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {H / 2:.1f})">log10 value</text>',
    ]
    if title:
        out.append(f'<text x="{W / 2:.1f}" y="25" text-anchor="middle">{title}</text>')
    for v in np.arange(math.ceil(x0), math.floor(x1) + 1):
        out.append(f'<text x="{px(v):.1f}" y="{H - pad + 16}" text-anchor="middle">{v:g}</text>')
    for v in np.arange(math.ceil(y0 * 2) / 2, y1, 0.5):
        out.append(f'<text x="{pad - 6}" y="{py(v) + 4:.1f}" text-anchor="end">{v:g}</text>')
    for k, (name, y) in enumerate(ys.items()):
        color = _COLORS[k % len(_COLORS)]
        for a, b in zip(lx, y):
            out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="4" fill="{color}"/>')
        label = name
        fit = fits.get(name)
        if fit is not None:
            # intercept is in natural logs; convert to base 10
            c = fit.intercept / math.log(10)
            xa, xb = lx.min(), lx.max()
            out.append(
                f'<line x1="{px(xa):.2f}" y1="{py(c + fit.slope * xa):.2f}" '
                f'x2="{px(xb):.2f}" y2="{py(c + fit.slope * xb):.2f}" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
            label += f" (slope {fit.slope:.3f})"
        out.append(f'<text x="{pad + 10}" y="{pad + 18 + 16 * k}" fill="{color}">{label}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


# manifest -----------------------------------------------------------------------


def build_manifest(cfg, result, version: str, wall_seconds: float) -> dict:
    return {
        "experiment": cfg.experiment,
        "version": version,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": cfg.to_dict(),
        "config_text": cfg.to_text(),
        "constants": result.constants,
        "wall_seconds": wall_seconds,
        "inner_profile_seconds": result.inner_seconds,
        "runs": [
            {
                "nu": p.nu,
                "seconds": p.seconds,
                "dt": p.dt,
                "n_steps": p.n_steps,
                "n_cells": p.n_cells,
                "snapshot_times": list(p.snapshot_times),
            }
            for p in result.points
        ],
        "fits": {k: {"slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared}
                 for k, f in result.fits.items()},
    }


def write_manifest(path: str | Path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
