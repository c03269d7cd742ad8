"""Regions, the smooth cutoff, and the glued matched approximation.

The outer partial sum ``psi0 + K nu psi1`` is used where the Euclidean
distance to the preshock exceeds ``R nu^beta / 2``; the blown-down inner
profile ``nu^(1/4) U(nu^-1/2 t, nu^-3/4 x)`` is used inside ``R nu^beta / 4``;
a C-infinity cutoff interpolates in between.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import optimize

from viscid.hyperbolic import InviscidSolution, inviscid_eval, outer_corrector_psi1
from viscid.model import SystemSpec
from viscid.parabolic import FieldSlab
from viscid.profile import CubicParams, field_d

BETA_MIN = 6.0 / 13.0


class CoverageError(ValueError):
    """The stored inner profile does not cover the inner region."""


@dataclass(frozen=True)
class MatchedConfig:
    nu: float
    K: int = 1
    L: int = 0
    beta: float = 0.47
    cutoff_R: float | None = None  # None: derive from the data contour

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if self.K not in (0, 1):
            raise ValueError("only K in {0, 1} is realized")
        if self.L != 0:
            raise ValueError("only L = 0 is realized")
        if not BETA_MIN < self.beta < 0.5:
            raise ValueError(f"beta must lie strictly inside (6/13, 1/2), got {self.beta}")
        if self.cutoff_R is not None and not self.cutoff_R > 0:
            raise ValueError("cutoff radius must be positive")

    def radius(self, system: SystemSpec) -> float:
        if self.cutoff_R is not None:
            return self.cutoff_R
        return contour_radius(system.speed_constant)

    def scale(self, system: SystemSpec) -> float:
        """``R nu^beta``."""
        return self.radius(system) * self.nu**self.beta


@functools.lru_cache(maxsize=None)
def contour_radius(speed_constant: float) -> float:
    """Largest ``R`` with ``{e < R}`` inside the region above ``t = -cos(x)/S``.

    Equals the Euclidean distance from the origin to the boundary of that
    region, i.e. the contour and its vertical sides at ``x = +-pi/2``.
    """
    S = float(speed_constant)
    if not S > 0:
        raise ValueError("speed constant must be positive")

    def dist(x):
        return math.hypot(math.cos(x) / S, x)

    xs = np.linspace(0.0, math.pi / 2, 4001)
    vals = np.hypot(np.cos(xs) / S, xs)
    k = int(np.argmin(vals))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, xs.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(dist, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        best = min(float(res.fun), float(vals[k]))
    else:
        best = float(vals[k])
    # symmetric in x; the sides x = +-pi/2 are at distance >= pi/2
    return min(best, math.pi / 2)


class RegionTag(enum.Flag):
    OUTER = enum.auto()
    MATCHING = enum.auto()
    INNER = enum.auto()
    DIFFUSIVE = enum.auto()


def region_classify(t: float, x: float, mc: MatchedConfig, system: SystemSpec) -> RegionTag:
    """Tag a point by cutoff zone; ``DIFFUSIVE`` is added where ``d <= nu^(1/4)``."""
    if t > 0:
        raise ValueError("regions are defined for t <= 0")
    scale = mc.scale(system)
    e = math.hypot(t, x)
    if e >= 0.5 * scale:
        tag = RegionTag.OUTER
    elif e <= 0.25 * scale:
        tag = RegionTag.INNER
    else:
        tag = RegionTag.MATCHING
    if field_d(t, x, system.cubic) <= mc.nu**0.25:
        tag |= RegionTag.DIFFUSIVE
    return tag


class InnerDistances(NamedTuple):
    E: float | np.ndarray
    D: float | np.ndarray


def inner_distances(T, X, nu: float, c: CubicParams = CubicParams()) -> InnerDistances:
    """Euclidean and cubic distances in blow-up coordinates."""
    T = np.asarray(T, dtype=float)
    X = np.asarray(X, dtype=float)
    E = np.hypot(T, nu**0.25 * X)
    D = np.asarray(field_d(T, X, c))
    unwrap = lambda v: v.item() if np.ndim(v) == 0 else v
    return InnerDistances(unwrap(E), unwrap(D))


def _bump(y):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)


def theta(s):
    """Smooth step: 0 for ``s <= 1/2``, 1 for ``s >= 1``, ``theta(3/4) = 1/2``."""
    y = np.clip(2.0 * np.asarray(s, dtype=float) - 1.0, 0.0, 1.0)
    g0, g1 = _bump(y), _bump(1.0 - y)
    out = g0 / (g0 + g1)
    return out.item() if out.ndim == 0 else out


def cutoff_zeta(t, x, mc: MatchedConfig, system: SystemSpec):
    return theta(2.0 * np.hypot(t, x) / mc.scale(system))


class MatchedSolution:
    """Glued approximation ``zeta * outer + (1 - zeta) * inner``.

    ``U`` is a slab of the inner profile in blow-up coordinates.
    """

    def __init__(self, mc: MatchedConfig, sol: InviscidSolution, U: FieldSlab):
        if mc.K == 1 and sol.system.n_components != 1:
            raise NotImplementedError("K = 1 needs the first outer corrector, realized for N = 1")
        self.mc = mc
        self.sol = sol
        self.U = U
        scale = mc.scale(sol.system)
        nu = mc.nu
        T_need = 0.5 * scale * nu**-0.5
        X_need = 0.5 * scale * nu**-0.75
        xs = U.grid.centers
        if U.times[0] > -T_need or xs[0] > -X_need or xs[-1] < X_need:
            raise CoverageError(
                f"inner box must cover T in [-{T_need:.3g}, 0], |X| <= {X_need:.3g}"
            )

    def outer(self, t, x) -> np.ndarray:
        psi = inviscid_eval(self.sol, t, x)
        if self.mc.K == 1:
            with np.errstate(invalid="ignore"):
                corr = np.asarray(outer_corrector_psi1(self.sol, t, x))
            psi = psi.copy()
            psi[0] = psi[0] + self.mc.nu * np.nan_to_num(corr)
        return psi

    def inner(self, t, x) -> np.ndarray:
        nu = self.mc.nu
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        out = np.zeros((self.sol.system.n_components,) + t.shape)
        out[0] = nu**0.25 * self.U.interpolate(t * nu**-0.5, x * nu**-0.75)
        return out

    def __call__(self, t, x) -> np.ndarray:
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        zeta = np.asarray(cutoff_zeta(t, x, self.mc, self.sol.system))
        result = np.empty((self.sol.system.n_components,) + t.shape)
        full = zeta >= 1.0
        result[:, full] = self.outer(t[full], x[full])
        rest = ~full
        if np.any(rest):
            inner = self.inner(t[rest], x[rest])
            part = zeta[rest] > 0
            blend = inner.copy()
            if np.any(part):
                z = zeta[rest][part]
                o = self.outer(t[rest][part], x[rest][part])
                blend[:, part] = z * o + (1.0 - z) * inner[:, part]
            result[:, rest] = blend
        return result


def matched_solution(mc: MatchedConfig, t, x, U: FieldSlab, sol: InviscidSolution) -> np.ndarray:
    return MatchedSolution(mc, sol, U)(t, x)


# discrete residual ------------------------------------------------------------------


Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def pde_residual(field: Field | FieldSlab, system: SystemSpec, nu: float, t: float, x: float,
                 h: float) -> np.ndarray:
    """``psi_t + A(psi) psi_x - nu (B(psi) psi_x)_x`` by central differences.

    Space derivatives use the 5-point stencil, time the centred 2-point
    difference with the same step.
    """
    if isinstance(field, FieldSlab):
        slab = field

        def field(tt, xx):
            return np.stack([slab.interpolate(tt, xx, c) for c in range(slab.data.shape[1])])

    if t + h > 0:
        raise ValueError("time stencil crosses the preshock time")
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    col = np.asarray(field(np.full(5, t), x + offs), dtype=float)  # (N, 5)
    psi = col[:, 2]
    psi_x = (col[:, 0] - 8.0 * col[:, 1] + 8.0 * col[:, 3] - col[:, 4]) / (12.0 * h)
    ahead = np.asarray(field(np.array([t + h]), np.array([x])), dtype=float)[:, 0]
    behind = np.asarray(field(np.array([t - h]), np.array([x])), dtype=float)[:, 0]
    psi_t = (ahead - behind) / (2.0 * h)

    A = system.jacobian(psi)
    B = system.diffusion(col)  # (N, N, 5)
    if np.all(B == B[..., :1]):
        psi_xx = (-col[:, 0] + 16.0 * col[:, 1] - 30.0 * col[:, 2]
                  + 16.0 * col[:, 3] - col[:, 4]) / (12.0 * h * h)
        visc = B[..., 2] @ psi_xx
    else:
        # flux B(psi) psi_x at x +- h, then a centred difference
        g_plus = B[..., 3] @ ((col[:, 4] - col[:, 2]) / (2 * h))
        g_minus = B[..., 1] @ ((col[:, 2] - col[:, 0]) / (2 * h))
        visc = (g_plus - g_minus) / (2 * h)
    return psi_t + A @ psi_x - nu * visc
