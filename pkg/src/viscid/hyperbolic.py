"""Inviscid objects built on the self-similar preshock.

With shocking data ``u(t0, .)`` the inviscid shocking component is the cubic
profile itself for every ``t in [t0, 0]``, so everything here is exact or
reduces to one-dimensional quadrature along straight characteristics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from viscid.model import SystemSpec, make_burgers
from viscid.profile import CubicParams, SingularPointError, cubic_root, profile_eval


class TimeWindowError(ValueError):
    """Raised for evaluations outside ``[t0, 0]``."""


@dataclass(frozen=True)
class InviscidSolution:
    """Inviscid solution with self-similar shocking data at ``t0``.

    ``nonshock_data`` is the profile of the nonshocking component at ``t0``;
    it is transported with speed -1 (only used when N = 2).
    """

    system: SystemSpec = field(default_factory=make_burgers)
    t0: float = -1.0
    nonshock_data: Callable[[np.ndarray], np.ndarray] = np.sin

    def __post_init__(self):
        if not self.t0 < 0:
            raise ValueError("t0 must be negative")

    @property
    def cubic(self) -> CubicParams:
        return self.system.cubic


def _check_window(sol: InviscidSolution, t):
    t = np.asarray(t)
    if np.any(t < sol.t0 - 1e-14) or np.any(t > 0):
        raise TimeWindowError(f"time outside [{sol.t0}, 0]")


def inviscid_eval(sol: InviscidSolution, t, x) -> np.ndarray:
    """State of the inviscid solution, shape ``(N,) + broadcast(t, x).shape``."""
    _check_window(sol, t)
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    sigma = np.asarray(cubic_root(t, x, sol.cubic))
    if sol.system.n_components == 1:
        return sigma[np.newaxis]
    # diagonal frozen basis: nonshocking speed A_2^2 = -1
    w = sol.nonshock_data(x + (t - sol.t0))
    return np.stack([sigma, np.asarray(w, dtype=float)])


def shocking_speed(sol: InviscidSolution, t, x):
    """``lambda_(1)`` evaluated on the inviscid solution."""
    psi = inviscid_eval(sol, t, x)
    return sol.system.jacobian(psi)[0, 0]


# eikonal function ------------------------------------------------------------


@dataclass
class EikonalField:
    times: np.ndarray
    x: np.ndarray
    values: np.ndarray  # shape (len(times), len(x))
    t0: float
    shift: float = 0.0


def _trace(sol: InviscidSolution, t_start: float, x_start: np.ndarray, t_stop: float,
           tol: float) -> np.ndarray:
    x_start = np.asarray(x_start, dtype=float)
    if t_start == t_stop:
        return x_start.copy()

    def rhs(s, y):
        return shocking_speed(sol, min(s, 0.0), y)

    out = integrate.solve_ivp(
        rhs, (t_start, t_stop), x_start, method="RK45", rtol=tol, atol=tol,
    )
    if not out.success:
        raise RuntimeError(f"characteristic tracer failed: {out.message}")
    return out.y[:, -1]


def trace_characteristic(sol: InviscidSolution, t_start: float, x_start, t_stop: float,
                         tol: float = 1e-11):
    """Follow ``dx/dt = lambda_(1)(psi0)`` from ``t_start`` to ``t_stop``."""
    return _trace(sol, t_start, x_start, t_stop, tol)


def eikonal_compute(sol: InviscidSolution, x, times: Sequence[float],
                    tol: float = 1e-11) -> EikonalField:
    """Eikonal function ``u`` with ``u(t0, x) = x - c`` by backward tracing.

    The shift ``c`` is zero for the odd self-similar data, which keeps the
    characteristic through the origin at ``u = 0``.
    """
    x = np.asarray(x, dtype=float)
    times = np.asarray(times, dtype=float)
    _check_window(sol, times)
    values = np.empty((times.size, x.size))
    for k, t in enumerate(times):
        values[k] = _trace(sol, float(t), x, sol.t0, tol)
    return EikonalField(times=times, x=x, values=values, t0=sol.t0, shift=0.0)


# outer corrector and zeroth-column grid term -----------------------------------


def _forcing_coeff(c: CubicParams) -> float:
    # b_diff * u_xx = coeff * u * m**3
    return -6.0 * c.b_diff * c.b / c.a**3


def _require_scalar(sol: InviscidSolution):
    if sol.system.n_components != 1:
        raise NotImplementedError("first outer corrector is implemented for N = 1 only")


def outer_corrector_psi1(sol: InviscidSolution, t, x, method: str = "closed"):
    """First outer corrector ``psi^(1)`` with zero data at ``t0``.

    Solves ``psi1_t + (A(psi0) psi1)_x = B psi0_xx``.  Along the straight
    characteristic through ``(t, x)`` the profile value ``u`` is frozen and
    the integrating factor is ``m``, which gives

        psi1 = coeff * u * m * (m - m0),   m0 = m(t0, characteristic foot).

    ``method="quadrature"`` integrates the same characteristic formula
    numerically instead.
    """
    _require_scalar(sol)
    _check_window(sol, t)
    c = sol.cubic
    if method == "closed":
        ev = profile_eval(t, x, c)
        u, m = np.asarray(ev.u), np.asarray(ev.m)
        m0 = 1.0 / (abs(sol.t0) + 3.0 * c.b / c.a * u * u)
        with np.errstate(invalid="ignore"):
            out = np.where(np.isinf(m), np.nan, _forcing_coeff(c) * u * m * (m - m0))
        return out.item() if out.ndim == 0 else out
    if method == "quadrature":
        return _psi1_quadrature(sol, float(t), float(x))
    raise ValueError(f"unknown method {method!r}")


def _psi1_quadrature(sol: InviscidSolution, t: float, x: float) -> float:
    c = sol.cubic
    ev = profile_eval(t, x, c)
    if np.isinf(ev.m):
        raise SingularPointError("corrector is singular at the preshock")
    u = ev.u
    k = 3.0 * c.b / c.a * u * u

    def integrand(s):
        ms = 1.0 / (abs(s) + k)
        # d^2 * b_diff * u_xx along the characteristic
        return _forcing_coeff(c) * u * ms**3 / ms

    val, _ = integrate.quad(integrand, sol.t0, t, epsabs=1e-13, epsrel=1e-12, limit=200)
    return ev.m * val


def grid_sigma10(t, x, c: CubicParams = CubicParams(), method: str = "closed"):
    """Zeroth-column grid term ``sigma_{1,0}``, a (-3)-homogeneous function.

    Same characteristic formula as the outer corrector but with data at
    past infinity, so the ``m0`` term drops: ``sigma10 = coeff * u * m**2``.
    """
    if method == "closed":
        ev = profile_eval(t, x, c)
        u, m = np.asarray(ev.u), np.asarray(ev.m)
        if np.any(np.isinf(m)):
            raise SingularPointError("sigma_{1,0} is singular at the preshock")
        out = _forcing_coeff(c) * u * m * m
        return out.item() if out.ndim == 0 else out
    if method == "quadrature":
        return _sigma10_quadrature(float(t), float(x), c)
    raise ValueError(f"unknown method {method!r}")


def _sigma10_quadrature(t: float, x: float, c: CubicParams,
                        s_start: float = -1.0e6) -> float:
    ev = profile_eval(t, x, c)
    if np.isinf(ev.m):
        raise SingularPointError("sigma_{1,0} is singular at the preshock")
    u = ev.u
    k = 3.0 * c.b / c.a * u * u
    coeff = _forcing_coeff(c) * u

    def integrand(s):
        return coeff / (abs(s) + k) ** 2

    # split at t - 1 so the quadrature sees the algebraic tail separately
    mid = min(t - 1.0, -1.0)
    head, _ = integrate.quad(integrand, mid, t, epsabs=1e-14, epsrel=1e-12, limit=200)
    body, _ = integrate.quad(integrand, s_start, mid, epsabs=1e-14, epsrel=1e-12, limit=400)
    tail = coeff / (abs(s_start) + k)  # closed-form integral over (-inf, s_start)
    return ev.m * (head + body + tail)
