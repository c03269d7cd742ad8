"""Numerical laboratory for weakly viscous shock formation in 1D conservation laws."""

__version__ = "0.1.0"

from viscid.profile import CubicParams, cubic_root, profile_eval, profile_gradient
from viscid.model import SystemSpec, make_burgers, make_burgers_transport, make_system
from viscid.hyperbolic import InviscidSolution, inviscid_eval, outer_corrector_psi1, grid_sigma10
from viscid.parabolic import (
    FieldSlab, Grid1D, ViscousRunConfig, far_field_constant, inner_profile_U, run_viscous,
)
from viscid.assembly import MatchedConfig, matched_solution, pde_residual
from viscid.analysis import RateFit, fit_rate, holder_seminorm, sup_diff, universal_compare
from viscid.config import ExperimentConfig, parse_config
from viscid.experiments import run_experiment

__all__ = [
    "CubicParams", "cubic_root", "profile_eval", "profile_gradient",
    "SystemSpec", "make_burgers", "make_burgers_transport", "make_system",
    "InviscidSolution", "inviscid_eval", "outer_corrector_psi1", "grid_sigma10",
    "FieldSlab", "Grid1D", "ViscousRunConfig", "far_field_constant", "inner_profile_U",
    "run_viscous",
    "MatchedConfig", "matched_solution", "pde_residual",
    "RateFit", "fit_rate", "holder_seminorm", "sup_diff", "universal_compare",
    "ExperimentConfig", "parse_config", "run_experiment",
]
