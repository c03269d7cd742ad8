"""Direct finite-difference solution of the viscous system and the inner profile.

Method of lines on a uniform cell-centred grid with two ghost cells per side:

* diffused components: centred flux ``(f_i + f_{i+1}) / 2``;
* undiffused components: third-order upwind-biased flux on a Lax-Friedrichs
  splitting (numerical dissipation must stay below the physical one);
* diffusion ``nu d_x[B(psi) d_x psi]`` in conservation form;
* SSP-RK2 in time with a fixed step chosen from the initial data.

Ghost cells carry exact Dirichlet data.  Runs are deterministic: the step
size, step count and every reduction order are fixed by the config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from viscid.hyperbolic import InviscidSolution, inviscid_eval
from viscid.model import SystemSpec
from viscid.profile import CubicParams, cubic_root, field_d

N_GHOST = 2


class ResolutionError(ValueError):
    """Grid too coarse for the diffusive layer at the requested viscosity."""


class InstabilityError(RuntimeError):
    """Non-finite values appeared during time stepping."""


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    dx: float
    n_cells: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.n_cells < 4:
            raise ValueError("need at least 4 cells")

    @classmethod
    def covering(cls, x_lo: float, x_hi: float, dx_max: float) -> "Grid1D":
        """Uniform grid on ``[x_lo, x_hi]`` with spacing at most ``dx_max``."""
        n = max(4, math.ceil((x_hi - x_lo) / dx_max - 1e-9))
        return cls(x_lo, (x_hi - x_lo) / n, n)

    @property
    def x_max(self) -> float:
        return self.x_min + self.n_cells * self.dx

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def ghosted_centers(self) -> np.ndarray:
        return self.x_min + (np.arange(-N_GHOST, self.n_cells + N_GHOST) + 0.5) * self.dx


StateFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class ViscousRunConfig:
    """Configuration of one viscous run.

    ``reference`` supplies initial and Dirichlet data unless ``initial`` /
    ``boundary`` callables ``(t, x) -> (N, ...)`` override them.
    """

    system: SystemSpec
    nu: float
    grid: Grid1D
    t0: float = -1.0
    t_end: float = 0.0
    cfl_adv: float = 0.4
    cfl_diff: float = 0.4
    store_times: Sequence[float] = ()
    measure_undiffused: bool = False
    reference: InviscidSolution | None = None
    initial: StateFn | None = None
    boundary: StateFn | None = None
    advection: bool = True  # test hook: False drops the hyperbolic flux

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive; inviscid data come from the hyperbolic module")
        if not self.t0 < self.t_end:
            raise ValueError("need t0 < t_end")
        if self.t_end > 0:
            raise ValueError("t_end must not exceed the preshock time 0")
        if not (0 < self.cfl_adv <= 1 and 0 < self.cfl_diff <= 1):
            raise ValueError("CFL numbers must lie in (0, 1]")
        check_resolution(self.grid.dx, self.nu, self.measure_undiffused)
        if self.reference is None:
            self.reference = InviscidSolution(self.system, t0=self.t0)

    def data(self, t, x) -> np.ndarray:
        fn = self.boundary or (lambda tt, xx: inviscid_eval(self.reference, tt, xx))
        return np.asarray(fn(t, x), dtype=float)

    def initial_data(self, x) -> np.ndarray:
        if self.initial is not None:
            return np.asarray(self.initial(self.t0, x), dtype=float)
        return self.data(np.full_like(x, self.t0), x)


def check_resolution(dx: float, nu: float, undiffused: bool = False) -> None:
    if dx > 0.25 * nu**0.75 * (1 + 1e-12):
        raise ResolutionError(
            f"dx = {dx:.3e} exceeds 0.25 nu^(3/4) = {0.25 * nu**0.75:.3e}"
        )
    if undiffused and dx > 0.1 * nu * (1 + 1e-12):
        raise ResolutionError(f"dx = {dx:.3e} exceeds 0.1 nu = {0.1 * nu:.3e}")


@dataclass
class FieldSlab:
    """Snapshots of all components on the cell centres of ``grid``."""

    grid: Grid1D
    times: np.ndarray
    data: np.ndarray  # (n_times, N, n_cells)
    requested_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    dt: float = float("nan")
    n_steps: int = 0
    # time integral of the net boundary flux, per snapshot and component
    boundary_flux: np.ndarray | None = None

    @property
    def x(self) -> np.ndarray:
        return self.grid.centers

    def at(self, k: int, component: int = 0) -> np.ndarray:
        return self.data[k, component]

    def interpolate(self, t, x, component: int = 0) -> np.ndarray:
        """Bilinear interpolation in ``(t, x)`` between cell centres and snapshots."""
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        xs, ts = self.grid.centers, self.times
        tol = 1e-12 * max(1.0, float(np.max(np.abs(ts))))
        if np.any(x < xs[0] - 1e-12) or np.any(x > xs[-1] + 1e-12):
            raise ValueError("interpolation point outside the grid")
        if np.any(t < ts[0] - tol) or np.any(t > ts[-1] + tol):
            raise ValueError("interpolation time outside the stored snapshots")
        fx = np.clip((x - xs[0]) / self.grid.dx, 0.0, xs.size - 1.0)
        i = np.minimum(fx.astype(int), xs.size - 2)
        wx = fx - i
        if ts.size == 1:
            j = np.zeros_like(i)
            wt = np.zeros_like(wx)
            j1 = j
        else:
            j = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, ts.size - 2)
            wt = np.clip((t - ts[j]) / (ts[j + 1] - ts[j]), 0.0, 1.0)
            j1 = j + 1
        f = self.data[:, component]
        lo = (1 - wx) * f[j, i] + wx * f[j, i + 1]
        hi = (1 - wx) * f[j1, i] + wx * f[j1, i + 1]
        return (1 - wt) * lo + wt * hi


def _upwind3(fp: np.ndarray, fm: np.ndarray) -> np.ndarray:
    """Third-order upwind-biased face values for split fluxes on a ghosted row.

    Returns fluxes at the ``n + 1`` faces bounding the interior cells.
    """
    # faces i+1/2 for i = 1 .. n+1 (ghosted indexing, interior starts at 2)
    left = (-fp[:-3] + 5.0 * fp[1:-2] + 2.0 * fp[2:-1]) / 6.0
    right = (2.0 * fm[1:-2] + 5.0 * fm[2:-1] - fm[3:]) / 6.0
    return left + right


class _Stepper:
    def __init__(self, cfg: ViscousRunConfig):
        s = cfg.system
        self.cfg = cfg
        self.s = s
        self.dx = cfg.grid.dx
        self.xg = cfg.grid.ghosted_centers()
        self.ghost_idx = np.r_[0:N_GHOST, cfg.grid.n_cells + N_GHOST:cfg.grid.n_cells + 2 * N_GHOST]
        self.diffused = np.array(s.diffused, dtype=bool)
        self.upwind = [i for i in range(s.n_components) if not s.diffused[i]]
        probe = np.zeros((s.n_components, 1))
        b0 = s.diffusion(probe)[..., 0]
        self.b_const = b0 if _is_constant_diffusion(s) else None

    def rhs(self, psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Semi-discrete right-hand side and net boundary flux (in - out)."""
        s, dx, nu = self.s, self.dx, self.cfg.nu
        n_faces = psi.shape[1] - 2 * N_GHOST + 1
        flux = np.zeros((s.n_components, n_faces))
        if self.cfg.advection:
            f = s.flux(psi)
            c = self.diffused
            inner = f[:, N_GHOST - 1:-N_GHOST]
            outer = f[:, N_GHOST:-N_GHOST + 1 or None]
            flux[c] = 0.5 * (inner[c] + outer[c])
            for i in self.upwind:
                alpha = s.component_speeds[i]
                fp = 0.5 * (f[i] + alpha * psi[i])
                fm = 0.5 * (f[i] - alpha * psi[i])
                flux[i] = _upwind3(fp, fm)
        grad = (psi[:, N_GHOST:-N_GHOST + 1] - psi[:, N_GHOST - 1:-N_GHOST]) / dx
        if self.b_const is not None:
            diff = self.b_const @ grad
        else:
            face = 0.5 * (psi[:, N_GHOST:-N_GHOST + 1] + psi[:, N_GHOST - 1:-N_GHOST])
            diff = np.einsum("ijn,jn->in", s.diffusion(face), grad)
        total = flux - nu * diff
        return -(total[:, 1:] - total[:, :-1]) / dx, total[:, 0] - total[:, -1]


def _is_constant_diffusion(s: SystemSpec) -> bool:
    rng = np.random.default_rng(0)
    probe = rng.uniform(-2, 2, size=(s.n_components, 8))
    b = s.diffusion(probe)
    return bool(np.all(b == b[..., :1]))


def _choose_dt(cfg: ViscousRunConfig, psi0: np.ndarray, boundary: np.ndarray) -> tuple[float, int]:
    s = cfg.system
    states = np.concatenate([psi0, boundary.reshape(s.n_components, -1)], axis=1)
    jac = s.jacobian(states)
    lam = float(np.max(np.abs(np.einsum("iin->in", jac)))) if cfg.advection else 0.0
    lam = max(lam, max(s.component_speeds) if cfg.advection else 0.0)
    bdiag = np.abs(np.einsum("iin->in", s.diffusion(states)))
    bmax = float(np.max(bdiag))
    dx = cfg.grid.dx
    limits = []
    if lam > 0:
        limits.append(cfg.cfl_adv * dx / lam)
    if bmax > 0:
        limits.append(cfg.cfl_diff * dx * dx / (2.0 * cfg.nu * bmax))
    dt_max = min(limits) if limits else cfg.t_end - cfg.t0
    span = cfg.t_end - cfg.t0
    n_steps = max(1, math.ceil(span / dt_max - 1e-9))
    return span / n_steps, n_steps


def run_viscous(cfg: ViscousRunConfig) -> FieldSlab:
    """Advance the viscous system from ``t0`` to ``t_end`` and return snapshots.

    Requested snapshot times snap to the nearest completed step; the actual
    times are recorded on the slab.
    """
    grid = cfg.grid
    s = cfg.system
    n = grid.n_cells
    x = grid.centers
    xg_ghost = grid.ghosted_centers()[np.r_[0:N_GHOST, n + N_GHOST:n + 2 * N_GHOST]]

    psi = np.empty((s.n_components, n + 2 * N_GHOST))
    psi[:, N_GHOST:-N_GHOST] = cfg.initial_data(x)

    # Dirichlet data at every step time, computed once
    probe_bc = cfg.data(np.full_like(xg_ghost, cfg.t0), xg_ghost)
    dt, n_steps = _choose_dt(cfg, psi[:, N_GHOST:-N_GHOST], probe_bc)
    step_times = cfg.t0 + dt * np.arange(n_steps + 1)
    step_times[-1] = cfg.t_end
    tt, xx = np.meshgrid(step_times, xg_ghost, indexing="ij")
    bc = cfg.data(tt, xx)  # (N, n_steps+1, 4)

    requested = np.asarray(sorted(cfg.store_times), dtype=float)
    if requested.size and (requested[0] < cfg.t0 - 1e-12 or requested[-1] > cfg.t_end + 1e-12):
        raise ValueError("store time outside the run window")
    # nearest completed step; requests landing on the same step share a snapshot
    snap_steps = np.unique(np.clip(np.rint((requested - cfg.t0) / dt).astype(int), 0, n_steps))
    wanted = {int(st): slot for slot, st in enumerate(snap_steps)}

    snaps = np.empty((snap_steps.size, s.n_components, n))
    ledger = np.empty((snap_steps.size, s.n_components))
    stepper = _Stepper(cfg)
    budget = np.zeros(s.n_components)

    def set_ghosts(state, k):
        state[:, :N_GHOST] = bc[:, k, :N_GHOST]
        state[:, -N_GHOST:] = bc[:, k, N_GHOST:]

    def record(k):
        slot = wanted.get(k)
        if slot is not None:
            snaps[slot] = psi[:, N_GHOST:-N_GHOST]
            ledger[slot] = budget

    set_ghosts(psi, 0)
    record(0)
    stage = np.empty_like(psi)
    for k in range(n_steps):
        l0, b0 = stepper.rhs(psi)
        stage[:, N_GHOST:-N_GHOST] = psi[:, N_GHOST:-N_GHOST] + dt * l0
        set_ghosts(stage, k + 1)
        l1, b1 = stepper.rhs(stage)
        psi[:, N_GHOST:-N_GHOST] = 0.5 * (psi[:, N_GHOST:-N_GHOST]
                                          + stage[:, N_GHOST:-N_GHOST] + dt * l1)
        set_ghosts(psi, k + 1)
        budget = budget + 0.5 * dt * (b0 + b1)
        if (k & 63) == 63 or k + 1 == n_steps:
            if not np.all(np.isfinite(psi)):
                raise InstabilityError(
                    f"non-finite values at step {k + 1} (t = {step_times[k + 1]:.6g}, nu = {cfg.nu:g})"
                )
        record(k + 1)

    return FieldSlab(
        grid=grid,
        times=step_times[snap_steps],
        data=snaps,
        requested_times=requested,
        dt=dt,
        n_steps=n_steps,
        boundary_flux=ledger,
    )


# blow-up coordinates ------------------------------------------------------------


def blowup(t, x, psi, nu: float):
    """``(T, X, Psi) = (nu^-1/2 t, nu^-3/4 x, nu^-1/4 psi)``."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    return t * nu**-0.5, x * nu**-0.75, psi * nu**-0.25


def blowdown(T, X, Psi, nu: float):
    """Inverse of :func:`blowup`."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    return T * nu**0.5, X * nu**0.75, Psi * nu**0.25


# inner profile -------------------------------------------------------------------


def make_inner_burgers(c: CubicParams) -> SystemSpec:
    """Scalar ``S_T + (-a) S S_X = b_diff S_XX`` used for the inner profile."""
    k = c.advection_coeff

    def flux(psi):
        return 0.5 * k * psi * psi

    def jacobian(psi):
        return (k * psi)[np.newaxis]

    def diffusion(psi):
        return np.full((1,) + psi.shape, c.b_diff)

    return SystemSpec(
        label="inner-burgers", n_components=1, flux=flux, jacobian=jacobian,
        diffusion=diffusion, wave_speed_bound=0.0, cubic=c,
        diffused=(True,), component_speeds=(0.0,),
    )


def inner_profile_U(
    T_min: float,
    X_box: float,
    dX: float = 0.1,
    c: CubicParams = CubicParams(),
    store_times: Sequence[float] = (0.0,),
    corrected: bool = False,
    cfl_diff: float = 0.4,
) -> FieldSlab:
    """Viscous Burgers profile in blow-up coordinates matching the cubic at infinity.

    Initial data ``u(T_min, .)`` and Dirichlet data ``u(T, +-X_box)``.  With
    ``corrected=True`` both carry the (-3)-homogeneous far-field term
    ``sigma_{1,0}`` as well, which shrinks the start-up error from
    ``O(D^-3)`` to ``O(D^-5)``.
    """
    if T_min > -4 or X_box < 4:
        raise ValueError("inner box too small: need T_min <= -4 and X_box >= 4")
    from viscid.hyperbolic import grid_sigma10

    system = make_inner_burgers(c)

    def data(t, x):
        u = np.asarray(cubic_root(t, x, c), dtype=float)
        if corrected:
            u = u + np.asarray(grid_sigma10(t, x, c), dtype=float)
        return u[np.newaxis]

    cfg = ViscousRunConfig(
        system=system, nu=1.0, grid=Grid1D.covering(-X_box, X_box, dX),
        t0=T_min, t_end=0.0, cfl_diff=cfl_diff, store_times=store_times,
        boundary=data,
    )
    return run_viscous(cfg)


def far_field_constant(U: FieldSlab, ring: tuple[float, float] = (3.0, 4.0),
                       c: CubicParams = CubicParams()) -> float:
    """Max of ``|U - u| d^3`` over stored cells whose cubic distance lies in ``ring``."""
    x = U.grid.centers
    best = -1.0
    for k, T in enumerate(U.times):
        tt = np.full_like(x, T)
        d = field_d(tt, x, c)
        keep = (d >= ring[0]) & (d <= ring[1])
        if keep.any():
            gap = np.abs(U.data[k, 0, keep] - cubic_root(tt[keep], x[keep], c))
            best = max(best, float(np.max(gap * d[keep] ** 3)))
    if best < 0:
        raise ValueError("no stored cell falls in the distance ring")
    return best


def grid_scaling_check(k: int, ell: int, nu: float, T, X, c: CubicParams = CubicParams()) -> float:
    """Compare the inner rescaling of ``psi_{k,l}`` with direct inner evaluation.

    ``Psi_{k,l}(T, X) = nu^(k - (l+1)/4) psi_{k,l}(nu^1/2 T, nu^3/4 X)``; by
    homogeneity this must equal ``psi_{k,l}(T, X)`` for the two realized terms.
    """
    from viscid.hyperbolic import grid_sigma10

    if (k, ell) == (0, 0):
        term = lambda t, x: np.asarray(cubic_root(t, x, c))
    elif (k, ell) == (1, 0):
        term = lambda t, x: np.asarray(grid_sigma10(t, x, c))
    else:
        raise NotImplementedError(f"grid term ({k}, {ell}) is not realized")
    T = np.asarray(T, dtype=float)
    X = np.asarray(X, dtype=float)
    scaled = nu ** (k - (ell + 1) / 4) * term(nu**0.5 * T, nu**0.75 * X)
    direct = term(T, X)
    return float(np.max(np.abs(scaled - direct) / np.maximum(1.0, np.abs(direct))))
