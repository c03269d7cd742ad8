"""Norms, Holder seminorms, rate fits and the universal-profile comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from viscid.parabolic import FieldSlab


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...] = field(default=())

    def predict(self, nu) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(nu, dtype=float) ** self.slope


def fit_rate(pairs: Sequence[tuple[float, float]]) -> RateFit:
    """Least-squares line through ``(log nu, log y)``."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3:
        raise ValueError("need at least 3 (nu, y) pairs")
    nu, y = arr[:, 0], arr[:, 1]
    if np.any(nu <= 0) or np.any(y <= 0):
        raise ValueError("nu and y must be positive")
    if np.unique(nu).size != nu.size:
        raise ValueError("nu values must be distinct")
    lx, ly = np.log(nu), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0),
                   tuple(zip(lx.tolist(), ly.tolist())))


Reference = Callable[[np.ndarray, np.ndarray], np.ndarray]
RegionFilter = Callable[[np.ndarray, np.ndarray], np.ndarray]


def sup_diff(slab: FieldSlab, reference: Reference, component: int = 0,
             region: RegionFilter | None = None) -> float:
    """Max over snapshots and cells of ``|slab - reference|`` in one component.

    ``reference(t, x)`` returns the state ``(N, ...)`` and is evaluated at
    the cell centres, never interpolated.  ``region(t, x)`` optionally masks
    the cells that count.
    """
    if not 0 <= component < slab.data.shape[1]:
        raise IndexError(f"component {component} out of range")
    x = slab.grid.centers
    worst = 0.0
    for k, t in enumerate(slab.times):
        ref = np.asarray(reference(np.full_like(x, t), x))[component]
        err = np.abs(slab.data[k, component] - ref)
        if region is not None:
            err = err[np.asarray(region(np.full_like(x, t), x), dtype=bool)]
        if err.size:
            worst = max(worst, float(np.max(err)))
    return worst


@dataclass(frozen=True)
class HolderEstimate:
    alpha: float
    seminorm: float
    window: tuple[float, float]
    pair_scheme: str = "dyadic"


def dyadic_separations(n: int, per_octave: int = 8) -> np.ndarray:
    """Index offsets ``round(2^(k/per_octave))`` below ``n``, plus ``n - 1``."""
    if n < 2:
        return np.empty(0, dtype=int)
    top = int(np.ceil(np.log2(n - 1) * per_octave)) + 1
    seps = np.unique(np.rint(2.0 ** (np.arange(top) / per_octave)).astype(int))
    seps = seps[(seps >= 1) & (seps <= n - 1)]
    return np.union1d(seps, [n - 1])


def holder_seminorm(values, x, alpha: float, window: tuple[float, float],
                    scheme: str = "dyadic") -> HolderEstimate:
    """Discrete ``C^alpha`` seminorm over pairs with near-dyadic separations.

    Every grid point anchors pairs at offsets ``2^(k/8)`` (rounded), so the
    cost is ``O(n log n)``; the estimate never exceeds the full pair scan.
    """
    if scheme != "dyadic":
        raise ValueError(f"unknown pair scheme {scheme!r}")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    values = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    lo, hi = window
    if lo < x[0] - 1e-12 or hi > x[-1] + 1e-12:
        raise ValueError("window outside the grid")
    keep = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    f, xs = values[keep], x[keep]
    best = 0.0
    for s in dyadic_separations(f.size):
        q = np.abs(f[s:] - f[:-s]) / np.abs(xs[s:] - xs[:-s]) ** alpha
        best = max(best, float(np.max(q)))
    return HolderEstimate(alpha=alpha, seminorm=best, window=(lo, hi), pair_scheme=scheme)


def universal_compare(slab: FieldSlab, U: FieldSlab, nu: float,
                      box: tuple[float, float, float, float] = (-1.0, 0.0, -3.0, 3.0),
                      n_T: int = 21, n_X: int = 61) -> float:
    """Sup over ``box = (T_lo, T_hi, X_lo, X_hi)`` of ``|nu^-1/4 sigma(nu^1/2 T, nu^3/4 X) - U|``.

    Both fields are interpolated bilinearly from their slabs.
    """
    T_lo, T_hi, X_lo, X_hi = box
    T = np.linspace(T_lo, T_hi, n_T)
    X = np.linspace(X_lo, X_hi, n_X)
    TT, XX = np.meshgrid(T, X, indexing="ij")
    for name, s, tt, xx in (("viscous run", slab, TT * nu**0.5, XX * nu**0.75),
                            ("inner profile", U, TT, XX)):
        xs = s.grid.centers
        if (tt.min() < s.times[0] - 1e-12 or tt.max() > s.times[-1] + 1e-12
                or xx.min() < xs[0] or xx.max() > xs[-1]):
            raise ValueError(f"{name} does not cover the comparison box")
    scaled = nu**-0.25 * slab.interpolate(TT * nu**0.5, XX * nu**0.75)
    return float(np.max(np.abs(scaled - U.interpolate(TT, XX))))
