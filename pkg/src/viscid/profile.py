"""Self-similar inverse-cubic preshock.

The profile ``u(t, x)`` is the unique real root of ``x = a|t| u + b u**3`` on
``t <= 0``.  Companion quantities::

    m = a du/dx = 1 / (|t| + 3 b/a u**2)
    d = m**-1/2           (cubic distance to the preshock)
    e = sqrt(t**2 + x**2) (Euclidean distance)

All functions accept scalars or broadcastable arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np


class ProfileDomainError(ValueError):
    """Raised when a profile is requested at positive time."""


class RootFindingError(RuntimeError):
    """The safeguarded Newton iteration did not converge (internal bug)."""


class SingularPointError(ValueError):
    """Raised when a derivative is requested at the preshock itself."""


@dataclass(frozen=True)
class CubicParams:
    """Constants of the preshock cubic and the shocking diffusion constant."""

    a: float = -1.0
    b: float = -1.0
    b_diff: float = 1.0

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise ValueError("cubic coefficients must be nonzero")
        if self.a * self.b <= 0:
            raise ValueError("a and b must share a sign (nondegenerate preshock)")
        if not self.b_diff > 0:
            raise ValueError("b_diff must be positive")

    @property
    def advection_coeff(self) -> float:
        """Derivative of the shocking eigenvalue along its eigenvector, ``-a``."""
        return -self.a


DEFAULT_CUBIC = CubicParams()


class SpacetimePoint(NamedTuple):
    t: float
    x: float


class ProfileEval(NamedTuple):
    u: float | np.ndarray
    m: float | np.ndarray
    d: float | np.ndarray
    e: float | np.ndarray


def _unwrap(v):
    v = np.asarray(v)
    return v.item() if v.ndim == 0 else v


def _check_time(t):
    if np.any(np.asarray(t) > 0):
        raise ProfileDomainError("profile is only defined for t <= 0")


def cubic_root(t, x, c: CubicParams = DEFAULT_CUBIC):
    """Solve ``x = a|t| u + b u**3`` for the unique real ``u``.

    A stable Cardano evaluation supplies the starting guess; a bracketed
    Newton iteration polishes it to machine precision.
    """
    _check_time(t)
    t, x0 = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    x_in = x0
    tau0 = np.abs(t)
    # deep linear regime: the cubic term is below 1e-300 relative, and one
    # correctly rounded division keeps digits that subnormal Newton steps lose
    with np.errstate(over="ignore", under="ignore"):
        linear = (tau0 > 0) & (np.abs(x0) <= 1e-150 * tau0 * np.sqrt(tau0))
    x0 = np.where(linear, 0.0, x0)

    # homogeneity u(l^2 t, l^3 x) = l u(t, x): rescale by an exact power of two
    # so the iteration always works on O(1) numbers
    mag = np.maximum(np.sqrt(tau0), np.cbrt(np.abs(x0)))
    with np.errstate(divide="ignore"):
        k = np.where(mag > 0, np.rint(np.log2(np.where(mag > 0, mag, 1.0))), 0.0).astype(int)
    tau = np.ldexp(tau0, -2 * k)
    x = np.ldexp(x0, -3 * k)

    # depressed cubic u^3 + p u + q = 0 with p >= 0
    p = c.a * tau / c.b
    q = -x / c.b
    s = np.sqrt(0.25 * q * q + p**3 / 27.0)
    big = np.cbrt(0.5 * np.abs(q) + s) * -np.sign(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, p / (3.0 * big), 0.0)
        denom = big * big + p / 3.0 + small * small
        u = np.where(denom > 0, -q / denom, 0.0)

    # |x| >= |b| |u|^3 because a and b share a sign
    span = np.cbrt(np.abs(x) / abs(c.b)) + 1.0
    lo, hi = -span, span
    u = np.clip(u, lo, hi)

    scale = np.maximum(1.0, np.abs(x))
    for _ in range(100):
        f = c.b * u**3 + c.a * tau * u - x
        # rounding floor of the three terms
        floor = 8e-16 * (abs(c.b) * np.abs(u) ** 3 + abs(c.a) * tau * np.abs(u) + np.abs(x))
        # f is monotone in u with the sign of b
        pos = f * np.sign(c.b) > 0
        hi = np.where(pos, u, hi)
        lo = np.where(pos, lo, u)
        fp = 3.0 * c.b * u * u + c.a * tau
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(fp != 0, f / fp, 0.0)
        nxt = u - step
        outside = ~((nxt >= lo) & (nxt <= hi)) | (fp == 0)
        nxt = np.where(outside & (f != 0), 0.5 * (lo + hi), nxt)
        done = (np.abs(f) <= floor) | (np.abs(nxt - u) <= 4e-16 * np.abs(u))
        u = np.where(done, u, nxt)
        if np.all(done):
            break
    else:
        raise RootFindingError("cubic root iteration failed to converge")
    res = np.abs(x - c.a * tau * u - c.b * u**3)
    if np.any(res > 1e-12 * scale):
        raise RootFindingError("cubic root residual above tolerance")
    with np.errstate(under="ignore"):
        lin = np.where(linear, x_in, 0.0) / np.where(linear, c.a * tau0, 1.0) + 0.0
    return _unwrap(np.where(linear, lin, np.ldexp(u, k)))


def profile_eval(t, x, c: CubicParams = DEFAULT_CUBIC) -> ProfileEval:
    """Evaluate ``(u, m, d, e)``; at the origin ``m = inf`` and ``d = 0``."""
    u = np.asarray(cubic_root(t, x, c))
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    d2 = np.abs(t) + 3.0 * c.b / c.a * u * u
    # m rounds to inf once d2 < 1/max_float
    with np.errstate(divide="ignore", over="ignore"):
        m = np.where(d2 > 0, 1.0 / np.where(d2 > 0, d2, 1.0), np.inf)
    d = np.sqrt(d2)
    e = np.hypot(t, x)
    return ProfileEval(_unwrap(u), _unwrap(m), _unwrap(d), _unwrap(e))


def profile_gradient(t, x, c: CubicParams = DEFAULT_CUBIC):
    """Closed-form ``(du/dx, du/dt) = (m/a, u m)`` away from the origin."""
    ev = profile_eval(t, x, c)
    if np.any(np.isinf(ev.m)):
        raise SingularPointError("gradient of the profile is infinite at the preshock")
    return _unwrap(np.asarray(ev.m) / c.a), _unwrap(np.asarray(ev.u) * ev.m)


def profile_uxx(t, x, c: CubicParams = DEFAULT_CUBIC):
    """Second space derivative ``-6 b a**-3 u m**3``."""
    ev = profile_eval(t, x, c)
    return _unwrap(-6.0 * c.b / c.a**3 * np.asarray(ev.u) * np.asarray(ev.m) ** 3)


def field_u(t, x, c: CubicParams = DEFAULT_CUBIC):
    return cubic_root(t, x, c)


def field_m(t, x, c: CubicParams = DEFAULT_CUBIC):
    return profile_eval(t, x, c).m


def field_d(t, x, c: CubicParams = DEFAULT_CUBIC):
    return profile_eval(t, x, c).d


def field_e(t, x, c: CubicParams = DEFAULT_CUBIC):
    return _unwrap(np.hypot(t, x))


def homogeneity_defect(
    r: float,
    lam: float,
    points: Iterable[SpacetimePoint],
    f: Callable[[float, float], float],
) -> float:
    """Largest relative violation of ``f(lam^2 t, lam^3 x) = lam^r f(t, x)``."""
    if not lam > 0:
        raise ValueError("scaling factor must be positive")
    worst = 0.0
    for t, x in points:
        _check_time(t)
        ref = lam**r * f(t, x)
        got = f(lam**2 * t, lam**3 * x)
        worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
    return float(worst)
