"""Built-in 1D viscous conservation laws.

States are arrays of shape ``(N, ...)``; component 0 is the shocking
component, the rest are nonshocking.  Every map is vectorized over the
trailing axes so solvers can evaluate whole grids at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from viscid.profile import CubicParams

Array = np.ndarray


@dataclass(frozen=True)
class SystemSpec:
    label: str
    n_components: int
    flux: Callable[[Array], Array]
    jacobian: Callable[[Array], Array]
    diffusion: Callable[[Array], Array]
    wave_speed_bound: float
    cubic: CubicParams = field(default_factory=CubicParams)
    # per-component flag: does B carry a nonzero diagonal entry?
    diffused: tuple[bool, ...] = (True,)
    # per-component bound on |characteristic speed| used for flux splitting
    component_speeds: tuple[float, ...] = (0.0,)

    @property
    def speed_constant(self) -> float:
        """``max |lambda(0)| + 1``, which fixes the data contour."""
        return self.wave_speed_bound + 1.0


def make_burgers() -> SystemSpec:
    """Viscous Burgers ``u_t + (u^2/2)_x = nu u_xx``."""

    def flux(psi):
        return 0.5 * psi * psi

    def jacobian(psi):
        return psi[np.newaxis]

    def diffusion(psi):
        return np.ones((1,) + psi.shape)

    return SystemSpec(
        label="burgers",
        n_components=1,
        flux=flux,
        jacobian=jacobian,
        diffusion=diffusion,
        wave_speed_bound=0.0,
        cubic=CubicParams(-1.0, -1.0, 1.0),
        diffused=(True,),
        component_speeds=(0.0,),
    )


def make_burgers_transport(b_cross: float) -> SystemSpec:
    """Viscous Burgers ``v`` driving a left-moving transport ``w``.

    ``w_t - w_x = nu * b_cross * v_xx``: the only coupling is the
    off-diagonal diffusion entry.
    """
    b_cross = float(b_cross)

    def flux(psi):
        v, w = psi[0], psi[1]
        return np.stack([0.5 * v * v, -w])

    def jacobian(psi):
        v = psi[0]
        zero = np.zeros_like(v)
        return np.stack([np.stack([v, zero]), np.stack([zero, zero - 1.0])])

    def diffusion(psi):
        v = psi[0]
        one, zero = np.ones_like(v), np.zeros_like(v)
        return np.stack([np.stack([one, zero]), np.stack([b_cross * one, zero])])

    return SystemSpec(
        label="burgers-transport",
        n_components=2,
        flux=flux,
        jacobian=jacobian,
        diffusion=diffusion,
        wave_speed_bound=1.0,
        cubic=CubicParams(-1.0, -1.0, 1.0),
        diffused=(True, False),
        component_speeds=(0.0, 1.0),
    )


def make_system(label: str, b_cross: float = 1.0) -> SystemSpec:
    if label == "burgers":
        return make_burgers()
    if label == "burgers-transport":
        return make_burgers_transport(b_cross)
    raise ValueError(f"unknown system label {label!r}")


def eval_system(s: SystemSpec, psi) -> tuple[Array, Array, Array]:
    """Flux, Jacobian and diffusion matrix at a single state."""
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    if psi.shape != (s.n_components,):
        raise ValueError(
            f"state has shape {psi.shape}, expected ({s.n_components},)"
        )
    if not np.all(np.isfinite(psi)):
        raise ValueError("state must be finite")
    return s.flux(psi), s.jacobian(psi), s.diffusion(psi)
