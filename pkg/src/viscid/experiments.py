"""Experiment drivers: per-viscosity runs, sweeps and their aggregation.

Per-nu work is a top-level function of picklable arguments, so sweeps can
fan out over a process pool; results come back in ``nu_list`` order and
aggregation is single-threaded, which keeps the outputs deterministic.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from viscid.analysis import RateFit, fit_rate, holder_seminorm, sup_diff, universal_compare
from viscid.assembly import MatchedConfig, MatchedSolution, contour_radius, pde_residual
from viscid.audit import AuditCheck, all_passed, run_invariant_suite
from viscid.config import ExperimentConfig
from viscid.hyperbolic import InviscidSolution, inviscid_eval, outer_corrector_psi1
from viscid.model import make_system
from viscid.parabolic import FieldSlab, Grid1D, ViscousRunConfig, inner_profile_U, run_viscous

EXIT_OK, EXIT_ERROR, EXIT_AUDIT = 0, 1, 2

# snapshot spacing of the inner profile in blow-up time
INNER_DT_STORE = 0.01

# Holder exponent above 2/3 at which the nonshocking gap is recorded, not asserted
W_HOLDER_ALPHA = 0.75
CROSS_COLUMNS = ("sup_w_diff", f"holder_w_{W_HOLDER_ALPHA:.4f}")


class ExperimentError(RuntimeError):
    """A sweep stage failed; the message names the viscosity and stage."""


@dataclass
class PointResult:
    nu: float
    values: dict[str, float]
    dt: float = math.nan
    n_cells: int = 0
    n_steps: int = 0
    seconds: float = 0.0
    snapshot_times: tuple[float, ...] = ()


@dataclass
class ExperimentResult:
    experiment: str
    columns: tuple[str, ...]
    rows: list[tuple]
    fits: dict[str, RateFit] = field(default_factory=dict)
    points: list[PointResult] = field(default_factory=list)
    constants: dict[str, float] = field(default_factory=dict)
    checks: list[AuditCheck] = field(default_factory=list)
    inner_seconds: float = 0.0

    @property
    def exit_code(self) -> int:
        if self.experiment == "audit" and not all_passed(self.checks):
            return EXIT_AUDIT
        return EXIT_OK

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows])


# metric names --------------------------------------------------------------------


def holder_column(alpha: float) -> str:
    return f"holder_{alpha:.4f}"


def burgers_metrics(cfg: ExperimentConfig) -> tuple[str, ...]:
    if cfg.experiment == "rate":
        return ("sup_diff", "sup_matched") if cfg.matched else ("sup_diff",)
    if cfg.experiment == "holder":
        return tuple(holder_column(a) for a in cfg.holder_alphas)
    if cfg.experiment == "universal":
        return ("sup_universal_err",)
    raise ValueError(f"{cfg.experiment} is not a Burgers sweep")


def needs_inner(metrics) -> bool:
    return any(m in ("sup_matched", "sup_universal_err") for m in metrics)


# inner profile --------------------------------------------------------------------


def _matched_config(cfg: ExperimentConfig, nu: float) -> MatchedConfig:
    return MatchedConfig(nu=nu, K=cfg.K, L=cfg.L, beta=cfg.beta,
                         cutoff_R=cfg.cutoff_R or None)


def inner_time_span(cfg: ExperimentConfig) -> float:
    """Blow-up time span the inner profile must store for every swept nu."""
    span = max(2.0, -cfg.universal_box[0])
    system = make_system(cfg.system, cfg.b_cross)
    for nu in cfg.nu_list:
        span = max(span, 0.5 * _matched_config(cfg, nu).scale(system) * nu**-0.5)
    return span


def build_inner_profile(cfg: ExperimentConfig) -> FieldSlab:
    span = inner_time_span(cfg)
    n = int(math.ceil(span / INNER_DT_STORE)) + 1
    return inner_profile_U(cfg.inner_T_min, cfg.inner_X_box, cfg.inner_dX,
                           store_times=np.linspace(-span, 0.0, n), corrected=True)


# per-nu work ---------------------------------------------------------------------


def burgers_store_times(cfg: ExperimentConfig, nu: float) -> np.ndarray:
    """Uniform snapshots over the window plus a dense set in ``|t| <= 2 nu^(1/2)``."""
    coarse = np.linspace(cfg.t0, cfg.t_end, cfg.n_store)
    dense = cfg.t_end + nu**0.5 * np.linspace(-2.0, 0.0, 201)
    return np.unique(np.concatenate([coarse, dense[dense >= cfg.t0]]))


def burgers_point(cfg: ExperimentConfig, nu: float, metrics: tuple[str, ...],
                  U: FieldSlab | None = None) -> PointResult:
    system = make_system("burgers")
    sol = InviscidSolution(system, t0=cfg.t0)
    grid = Grid1D.covering(cfg.x_lo, cfg.x_hi, cfg.dx(nu))
    start = time.perf_counter()
    slab = run_viscous(ViscousRunConfig(
        system=system, nu=nu, grid=grid, t0=cfg.t0, t_end=cfg.t_end,
        cfl_adv=cfg.cfl_adv, cfl_diff=cfg.cfl_diff,
        store_times=burgers_store_times(cfg, nu), reference=sol,
    ))
    values: dict[str, float] = {}
    reference = lambda t, x: inviscid_eval(sol, t, x)
    if "sup_diff" in metrics or "sup_matched" in metrics:
        values["sup_diff"] = sup_diff(slab, reference)
    if "sup_matched" in metrics:
        matched = MatchedSolution(_matched_config(cfg, nu), sol, U)
        T, X = np.meshgrid(slab.times, grid.centers, indexing="ij")
        values["sup_matched"] = float(np.max(np.abs(slab.data[:, 0] - matched(T, X)[0])))
    holder_alphas = [a for a in cfg.holder_alphas if holder_column(a) in metrics]
    if holder_alphas:
        t_last = slab.times[-1]
        gap = slab.data[-1, 0] - inviscid_eval(sol, np.full_like(grid.centers, t_last),
                                               grid.centers)[0]
        window = (-cfg.holder_window, cfg.holder_window)
        for a in holder_alphas:
            values[holder_column(a)] = holder_seminorm(gap, grid.centers, a, window).seminorm
    if "sup_universal_err" in metrics:
        values["sup_universal_err"] = universal_compare(slab, U, nu, cfg.universal_box)
    return PointResult(
        nu=nu, values={m: values[m] for m in metrics}, dt=slab.dt, n_cells=grid.n_cells,
        n_steps=slab.n_steps, seconds=time.perf_counter() - start,
        snapshot_times=tuple(slab.times.tolist()),
    )


def cross_point(cfg: ExperimentConfig, nu: float, b_cross: float | None = None,
                dx: float | None = None) -> PointResult:
    """``sup_x |w^nu - w^0|`` and its ``C^0.75`` seminorm at the final time."""
    system = make_system("burgers-transport", cfg.b_cross if b_cross is None else b_cross)
    sol = InviscidSolution(system, t0=cfg.t0)
    grid = Grid1D.covering(cfg.x_lo, cfg.x_hi, cfg.dx(nu) if dx is None else dx)
    start = time.perf_counter()
    slab = run_viscous(ViscousRunConfig(
        system=system, nu=nu, grid=grid, t0=cfg.t0, t_end=cfg.t_end,
        cfl_adv=cfg.cfl_adv, cfl_diff=cfg.cfl_diff, store_times=(cfg.t_end,),
        measure_undiffused=True, reference=sol,
    ))
    w0 = inviscid_eval(sol, np.full_like(grid.centers, slab.times[-1]), grid.centers)[1]
    gap = slab.data[-1, 1] - w0
    # stay clear of the boundary data
    half = min(cfg.holder_window, 0.5 * min(-cfg.x_lo, cfg.x_hi))
    window = (-half, half)
    values = {
        CROSS_COLUMNS[0]: float(np.max(np.abs(gap))),
        CROSS_COLUMNS[1]: holder_seminorm(gap, grid.centers, W_HOLDER_ALPHA, window).seminorm,
    }
    return PointResult(nu=nu, values=values, dt=slab.dt, n_cells=grid.n_cells,
                       n_steps=slab.n_steps, seconds=time.perf_counter() - start,
                       snapshot_times=tuple(slab.times.tolist()))


def residual_point(cfg: ExperimentConfig, nu: float) -> PointResult:
    """Pointwise residuals of the outer sums with zero and one corrector."""
    system = make_system("burgers")
    sol = InviscidSolution(system, t0=cfg.t0)
    t, x = cfg.residual_point
    start = time.perf_counter()

    def outer0(tt, xx):
        return inviscid_eval(sol, tt, xx)

    def outer1(tt, xx):
        return outer0(tt, xx) + nu * np.asarray(outer_corrector_psi1(sol, tt, xx))[np.newaxis]

    r0 = abs(float(pde_residual(outer0, system, nu, t, x, cfg.residual_h)[0]))
    r1 = abs(float(pde_residual(outer1, system, nu, t, x, cfg.residual_h)[0]))
    return PointResult(nu=nu, values={"residual_K0": r0, "residual_K1": r1},
                       seconds=time.perf_counter() - start)


# sweeps -------------------------------------------------------------------------


def _call(args):
    fn, cfg, nu, extra = args
    try:
        return fn(cfg, nu, *extra)
    except Exception as exc:  # re-raised with the failing stage named
        raise ExperimentError(f"nu = {nu:g}, stage {fn.__name__}: {exc}") from exc


def _map(fn, cfg: ExperimentConfig, extra: tuple, workers: int) -> list[PointResult]:
    jobs = [(fn, cfg, nu, extra) for nu in cfg.nu_list]
    if workers <= 1 or len(jobs) == 1:
        return [_call(job) for job in jobs]
    # largest (slowest) runs are last in nu_list; submit them first
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {i: pool.submit(_call, jobs[i]) for i in reversed(range(len(jobs)))}
        return [futures[i].result() for i in range(len(jobs))]


def _fits(columns, points: list[PointResult]) -> dict[str, RateFit]:
    fits = {}
    if len(points) < 3:
        return fits
    for name in columns:
        ys = [p.values[name] for p in points]
        if all(y > 0 and math.isfinite(y) for y in ys):
            fits[name] = fit_rate([(p.nu, y) for p, y in zip(points, ys)])
    return fits


def _aggregate(cfg, metrics, points, **extra) -> ExperimentResult:
    columns = ("nu",) + tuple(metrics)
    rows = [(p.nu,) + tuple(p.values[m] for m in metrics) for p in points]
    system = make_system(cfg.system, cfg.b_cross)
    S = system.speed_constant
    constants = {"S": S, "R": cfg.cutoff_R or contour_radius(S)}
    return ExperimentResult(cfg.experiment, columns, rows, _fits(metrics, points), points,
                            constants, **extra)


def burgers_sweep(cfg: ExperimentConfig, metrics: tuple[str, ...], workers: int = 1,
                  U: FieldSlab | None = None) -> ExperimentResult:
    """Burgers runs over ``cfg.nu_list`` measuring any mix of the sweep metrics."""
    inner_seconds = 0.0
    if U is None and needs_inner(metrics):
        start = time.perf_counter()
        try:
            U = build_inner_profile(cfg)
        except Exception as exc:
            raise ExperimentError(f"stage inner profile: {exc}") from exc
        inner_seconds = time.perf_counter() - start
    points = _map(burgers_point, cfg, (tuple(metrics), U), workers)
    return _aggregate(cfg, metrics, points, inner_seconds=inner_seconds)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Execute the configured experiment and return its aggregated result."""
    if cfg.experiment == "audit":
        checks = run_invariant_suite()
        rows = [(c.name, c.value, c.bound, float(c.passed)) for c in checks]
        system = make_system(cfg.system, cfg.b_cross)
        return ExperimentResult("audit", ("check", "value", "bound", "passed"), rows,
                                constants={"S": system.speed_constant,
                                           "R": contour_radius(system.speed_constant)},
                                checks=checks)
    if cfg.experiment == "cross_term":
        points = _map(cross_point, cfg, (), workers)
        return _aggregate(cfg, CROSS_COLUMNS, points)
    if cfg.experiment == "residual":
        points = _map(residual_point, cfg, (), workers)
        return _aggregate(cfg, ("residual_K0", "residual_K1"), points)
    return burgers_sweep(cfg, burgers_metrics(cfg), workers)
