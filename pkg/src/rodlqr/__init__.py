"""Optimal boundary feedback for a 1-D heat / reaction-diffusion rod.

The pipeline: build the open-loop eigenbasis, solve the boundary-control LQR
in that basis by a fixed-point Riccati sweep, extend the feedback to
polynomial terms (both spectrally and on a finite-difference grid), and
measure basins of stability with Crank-Nicolson simulations.
"""

__version__ = "0.1.0"

from .albrekht import FeedbackLaw, HjbExpansion, albrekht_expand, hjb_residual
from .closed_loop import ClosedLoopMode, closed_loop_modes, g_residual
from .cubic import (
    CubicCostTensor,
    QuadraticGain,
    cubic_cost_of_state,
    quadratic_gain,
    solve_cubic_tensor,
)
from .finite_model import (
    DiscreteLqr,
    DiscreteModel,
    build_discrete,
    solve_discrete_lqr,
    trapezoid_weights,
)
from .riccati import (
    LqrWeights,
    RiccatiSolution,
    cost_of_state,
    default_weights,
    initial_guess,
    linear_gain,
    riccati_iterate,
)
from .simulate import (
    BasinSweep,
    CrankNicolsonStepper,
    SimConfig,
    Trajectory,
    basin_sweep,
    simulate,
    step_crank_nicolson,
)
from .spectral import (
    ModeData,
    SpectralBasis,
    build_basis,
    cosine_inner_product,
    find_nu,
    normalization,
)

__all__ = [
    "FeedbackLaw", "HjbExpansion", "albrekht_expand", "hjb_residual",
    "ClosedLoopMode", "closed_loop_modes", "g_residual",
    "CubicCostTensor", "QuadraticGain", "cubic_cost_of_state",
    "quadratic_gain", "solve_cubic_tensor",
    "DiscreteLqr", "DiscreteModel", "build_discrete", "solve_discrete_lqr",
    "trapezoid_weights",
    "LqrWeights", "RiccatiSolution", "cost_of_state", "default_weights",
    "initial_guess", "linear_gain", "riccati_iterate",
    "BasinSweep", "CrankNicolsonStepper", "SimConfig", "Trajectory",
    "basin_sweep", "simulate", "step_crank_nicolson",
    "ModeData", "SpectralBasis", "build_basis", "cosine_inner_product",
    "find_nu", "normalization",
]
