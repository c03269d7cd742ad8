"""Invariant suite: cheap numeric checks of every module's structural properties.

Each check returns an ``AuditCheck`` holding the measured value, the bound
and whether the bound holds.  The suite backs the ``audit`` experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from viscid.analysis import holder_seminorm
from viscid.hyperbolic import (
    InviscidSolution,
    eikonal_compute,
    grid_sigma10,
    inviscid_eval,
    outer_corrector_psi1,
    trace_characteristic,
)
from viscid.model import make_burgers, make_burgers_transport
from viscid.parabolic import Grid1D, ViscousRunConfig, grid_scaling_check, run_viscous
from viscid.profile import (
    DEFAULT_CUBIC,
    cubic_root,
    field_d,
    field_m,
    field_u,
    homogeneity_defect,
    profile_eval,
    profile_gradient,
)


@dataclass(frozen=True)
class AuditCheck:
    name: str
    value: float
    bound: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.4g} {self.relation} {self.bound:.4g}"


def _le(name, value, bound) -> AuditCheck:
    value = float(value)
    return AuditCheck(name, value, bound, bool(value <= bound), "<=")


def _ge(name, value, bound) -> AuditCheck:
    value = float(value)
    return AuditCheck(name, value, bound, bool(value >= bound), ">=")


def _sample_box(n, t_lo, t_hi, x_lo, x_hi, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(t_lo, t_hi, n), rng.uniform(x_lo, x_hi, n)


# profile --------------------------------------------------------------------------


def check_cubic_residual() -> AuditCheck:
    c = DEFAULT_CUBIC
    t, x = _sample_box(10_000, -1.0, 0.0, -5.0, 5.0, seed=1)
    u = cubic_root(t, x)
    res = np.abs(x - c.a * np.abs(t) * u - c.b * u**3) / np.maximum(1.0, np.abs(x))
    return _le("cubic residual / max(1,|x|)", np.max(res), 1e-12)


def check_d2m() -> AuditCheck:
    t, x = _sample_box(5_000, -1.0, -1e-6, -2.0, 2.0, seed=2)
    ev = profile_eval(t, x)
    return _le("|d^2 m - 1|", np.max(np.abs(ev.d**2 * ev.m - 1.0)), 1e-12)


def check_monotone() -> AuditCheck:
    x = np.sort(np.random.default_rng(3).uniform(-3, 3, 2_000))
    worst = -math.inf
    for t in (-1.0, -0.3, -1e-3):
        du = np.diff(cubic_root(np.full_like(x, t), x))
        worst = max(worst, float(np.max(du)))
    return AuditCheck("cubic root strictly decreasing in x (max increment)", worst, 0.0,
                      bool(worst < 0.0), "<")


def _homog(name, f, r, lams=(0.5, 2.0, 10.0), bound=1e-12) -> AuditCheck:
    t, x = _sample_box(200, -1.0, -0.01, -1.0, 1.0, seed=4)
    pts = list(zip(t.tolist(), x.tolist()))
    worst = max(homogeneity_defect(r, lam, pts, f) for lam in lams)
    return _le(f"homogeneity defect of {name} (r = {r:g})", worst, bound)


def check_homogeneity() -> list[AuditCheck]:
    return [
        _homog("u", lambda t, x: field_u(t, x), 1),
        _homog("d", lambda t, x: field_d(t, x), 1),
        _homog("m", lambda t, x: field_m(t, x), -2),
        _homog("sigma_10", lambda t, x: grid_sigma10(t, x), -3, lams=(2.0,), bound=1e-10),
    ]


def check_gradient_identities() -> AuditCheck:
    t, x = _sample_box(200, -1.0, -0.05, -1.0, 1.0, seed=5)
    h = 1e-5
    ux, ut = profile_gradient(t, x)
    fd_x = (cubic_root(t, x + h) - cubic_root(t, x - h)) / (2 * h)
    fd_t = (cubic_root(t + h, x) - cubic_root(t - h, x)) / (2 * h)
    rel_x = np.abs(ux - fd_x) / np.maximum(np.abs(ux), 1e-300)
    # u_t vanishes on the centreline; measure relative to the gradient scale there
    rel_t = np.abs(ut - fd_t) / np.maximum(np.abs(ut), np.abs(ux))
    return _le("gradient identities vs finite differences (relative)",
               max(np.max(rel_x), np.max(rel_t)), 1e-6)


def check_distance_relation() -> list[AuditCheck]:
    t = np.linspace(-1.0, 0.0, 201)
    x = np.linspace(-1.0, 1.0, 401)
    T, X = np.meshgrid(t, x, indexing="ij")
    keep = (T != 0) | (X != 0)
    T, X = T[keep], X[keep]
    d = np.asarray(field_d(T, X))
    e = np.hypot(T, X)
    return [
        _ge("min d^2 / e over [-1,0]x[-1,1]", np.min(d * d / e), 0.3),
        _le("max d / e^(1/3) over [-1,0]x[-1,1]", np.max(d / np.cbrt(e)), 3.0),
    ]


# model --------------------------------------------------------------------------


def check_jacobians() -> list[AuditCheck]:
    out = []
    rng = np.random.default_rng(6)
    h = 1e-6
    for s in (make_burgers(), make_burgers_transport(1.0)):
        n = s.n_components
        worst = 0.0
        for _ in range(20):
            psi = rng.uniform(-2, 2, n)
            jac = s.jacobian(psi)
            fd = np.empty((n, n))
            for j in range(n):
                e = np.zeros(n)
                e[j] = h
                fd[:, j] = (s.flux(psi + e) - s.flux(psi - e)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(fd - jac)) / max(1.0, np.max(np.abs(jac)))))
        out.append(_le(f"{s.label}: Jacobian vs flux differences (relative)", worst, 1e-6))
        j0 = s.jacobian(np.zeros(n))
        b0 = s.diffusion(np.zeros(n))
        off = float(np.max(np.abs(j0 - np.diag(np.diag(j0)))))
        out.append(_le(f"{s.label}: |A(0) off-diagonal| + |A(0)_11|", off + abs(j0[0, 0]), 0.0))
        out.append(_le(f"{s.label}: |B(0)_11 - b_diff|", abs(b0[0, 0] - s.cubic.b_diff), 0.0))
    return out


# hyperbolic ---------------------------------------------------------------------


def check_inviscid_pde() -> AuditCheck:
    sol = InviscidSolution()
    rng = np.random.default_rng(7)
    t = rng.uniform(-0.95, -0.05, 400)
    x = rng.uniform(-1.0, 1.0, 400)
    keep = np.asarray(field_d(t, x)) >= 0.05
    t, x = t[keep][:100], x[keep][:100]
    h = 1e-5
    psi = inviscid_eval(sol, t, x)[0]
    dt = (inviscid_eval(sol, t + h, x) - inviscid_eval(sol, t - h, x))[0] / (2 * h)
    dx = (inviscid_eval(sol, t, x + h) - inviscid_eval(sol, t, x - h))[0] / (2 * h)
    return _le("inviscid PDE residual (d >= 0.05)", np.max(np.abs(dt + psi * dx)), 1e-4)


def check_eikonal() -> list[AuditCheck]:
    sol = InviscidSolution()
    feet = np.linspace(-1.5, 1.5, 13)
    times = (-0.7, -0.3, -0.05, -1e-3)
    drift = 0.0
    for t in times:
        x_t = trace_characteristic(sol, sol.t0, feet, t)
        u = eikonal_compute(sol, x_t, [t]).values[0]
        drift = max(drift, float(np.max(np.abs(u - feet))))
    tt = np.linspace(-1.0, -1e-3, 21)
    xx = np.linspace(-1.0, 1.0, 41)
    field = eikonal_compute(sol, xx, tt)
    T, X = np.meshgrid(tt, xx, indexing="ij")
    d2 = np.asarray(field_d(T, X)) ** 2
    ratio = (np.abs(T) + field.values**2) / d2
    return [
        _le("eikonal drift along traced characteristics", drift, 1e-8),
        _le("eikonal distance ratio max(r, 1/r)",
            max(float(np.max(ratio)), float(1.0 / np.min(ratio))), 4.0),
    ]


def check_out_bound_trend() -> AuditCheck:
    """Relative gap between the first corrector and sigma_10 along ``x = |t|^(3/2)``."""
    sol = InviscidSolution()
    ts = np.array([-0.5, -0.1, -0.02, -0.005])
    xs = np.abs(ts) ** 1.5
    p1 = np.asarray(outer_corrector_psi1(sol, ts, xs))
    s10 = np.asarray(grid_sigma10(ts, xs))
    ratio = np.abs(p1 - s10) / np.abs(s10)
    monotone = bool(np.all(np.diff(ratio) < 0))
    drop = float(ratio[0] / ratio[-1])
    return AuditCheck("corrector minus sigma_10, relative: monotone drop factor",
                      drop if monotone else 0.0, 3.0, monotone and drop >= 3.0, ">=")


def check_sigma10_pde() -> AuditCheck:
    rng = np.random.default_rng(8)
    t = rng.uniform(-1.0, -0.1, 300)
    x = rng.uniform(-1.0, 1.0, 300)
    h = 2e-5  # truncation error of the second difference dominates above this
    c = DEFAULT_CUBIC
    coef = -c.a  # d_1 A_1^1(0)

    def s(tt, xx):
        return np.asarray(grid_sigma10(tt, xx))

    def us(tt, xx):
        return np.asarray(cubic_root(tt, xx)) * s(tt, xx)

    s_t = (s(t + h, x) - s(t - h, x)) / (2 * h)
    flux_x = (us(t, x + h) - us(t, x - h)) / (2 * h)
    u_xx = (cubic_root(t, x + h) - 2 * cubic_root(t, x) + cubic_root(t, x - h)) / (h * h)
    res = s_t + coef * flux_x - c.b_diff * u_xx
    return _le("sigma_10 PDE residual", np.max(np.abs(res)), 1e-4)


def check_grid_scaling() -> list[AuditCheck]:
    T, X = _sample_box(500, -5.0, -0.1, -10.0, 10.0, seed=9)
    return [
        _le("inner rescaling of psi_00", grid_scaling_check(0, 0, 1e-3, T, X), 1e-12),
        _le("inner rescaling of psi_10", grid_scaling_check(1, 0, 1e-3, T, X), 1e-10),
    ]


# parabolic ---------------------------------------------------------------------


def _linear(t, x):
    return (np.asarray(x, dtype=float) / np.asarray(t, dtype=float))[np.newaxis]


def _linear_run(dx: float, nu: float) -> tuple[float, float]:
    grid = Grid1D.covering(-1.0, 1.0, dx)
    slab = run_viscous(ViscousRunConfig(
        system=make_burgers(), nu=nu, grid=grid, t0=-1.0, t_end=-0.5,
        store_times=(-0.5,), boundary=_linear,
    ))
    err = float(np.max(np.abs(slab.data[-1, 0] - grid.centers / slab.times[-1])))
    return err, slab.times[-1]


def check_linear_exact() -> AuditCheck:
    err, _ = _linear_run(0.01, 1.0)
    return _le("x/t exact solution, sup error at t = -1/2", err, 1e-8)


def check_grid_order() -> AuditCheck:
    coarse, _ = _linear_run(0.04, 0.1)
    fine, _ = _linear_run(0.02, 0.1)
    return _ge("grid refinement factor (x/t solution)", coarse / fine, 3.5)


def _burgers_run(nu=1e-2, t_end=-0.5):
    grid = Grid1D.covering(-2.0, 2.0, 0.2 * nu**0.75)
    return run_viscous(ViscousRunConfig(
        system=make_burgers(), nu=nu, grid=grid, t0=-1.0, t_end=t_end,
        store_times=(-1.0, t_end),
    ))


def check_conservation() -> AuditCheck:
    slab = _burgers_run()
    dx = slab.grid.dx
    change = (slab.data[-1, 0].sum() - slab.data[0, 0].sum()) * dx
    budget = slab.boundary_flux[-1, 0] - slab.boundary_flux[0, 0]
    scale = max(np.abs(slab.data[0, 0]).sum() * dx, abs(budget))
    return _le("conservation budget (relative)", abs(change - budget) / scale, 1e-8)


def check_determinism() -> AuditCheck:
    a = _burgers_run(t_end=-0.8)
    b = _burgers_run(t_end=-0.8)
    same = a.data.tobytes() == b.data.tobytes() and a.times.tobytes() == b.times.tobytes()
    return AuditCheck("repeat run byte-identical", 0.0 if same else 1.0, 0.0, same, "==")


# analysis ----------------------------------------------------------------------


def check_holder_oracle() -> AuditCheck:
    """Dyadic pairs against a full pair scan on cusp-like test functions."""
    worst = 0.0
    for n, alpha, f in (
        (1001, 0.5, lambda x: np.sqrt(np.abs(x))),
        (1500, 1 / 3, lambda x: np.cbrt(x) + 0.1 * np.sin(7 * x)),
        (2000, 0.25, lambda x: np.sign(x - 0.1) * np.abs(x - 0.1) ** 0.4),
        (800, 0.7, lambda x: np.cos(5 * x) * np.abs(x) ** 0.8),
    ):
        x = np.linspace(-1, 1, n)
        v = f(x)
        est = holder_seminorm(v, x, alpha, (-1.0, 1.0)).seminorm
        full = max(float(np.max(np.abs(v[i + 1:] - v[i]) / (x[i + 1:] - x[i]) ** alpha))
                   for i in range(n - 1))
        if est > full * (1 + 1e-12):
            return AuditCheck("dyadic Holder estimate exceeds the full scan", est / full, 1.0,
                              False, "<=")
        worst = max(worst, 1.0 - est / full)
    return _le("dyadic Holder estimate shortfall vs full scan", worst, 0.05)


CHECKS: tuple[Callable[[], AuditCheck | list[AuditCheck]], ...] = (
    check_cubic_residual,
    check_d2m,
    check_monotone,
    check_homogeneity,
    check_gradient_identities,
    check_distance_relation,
    check_jacobians,
    check_inviscid_pde,
    check_eikonal,
    check_out_bound_trend,
    check_sigma10_pde,
    check_grid_scaling,
    check_linear_exact,
    check_grid_order,
    check_conservation,
    check_determinism,
    check_holder_oracle,
)


def run_invariant_suite() -> list[AuditCheck]:
    results: list[AuditCheck] = []
    for check in CHECKS:
        out = check()
        results.extend(out if isinstance(out, list) else [out])
    return results


def all_passed(results: list[AuditCheck]) -> bool:
    return all(r.passed for r in results) and not any(math.isnan(r.value) for r in results)
