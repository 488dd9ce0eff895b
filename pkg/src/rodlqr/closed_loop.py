"""Spectrum of the diffusion operator under the feedback boundary condition.

Closing the loop leaves the interior dynamics untouched but replaces the
Robin condition at x=1 with a mixed pointwise/integral condition.  The
eigenfunctions are still ``cos(rho x)`` (Neumann at x=0), and ``rho`` must
solve the transcendental characteristic equation

    g(rho) = rho sin(rho) - beta cos(rho)
             + (beta^2/r) sum_ij P_ij phi_j(1) integral phi_i(x) cos(rho x) dx = 0,

where the integral has the usual closed cosine form.  Each closed-loop
eigenvalue is ``mu = -rho^2``.  The operator is no longer self adjoint, so
no orthogonality of the closed-loop family is claimed or used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NewtonDiverged
from .riccati import LqrWeights, RiccatiSolution
from .spectral import SpectralBasis, cosine_inner_product

_MAX_NEWTON_STEPS = 100
_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class ClosedLoopMode:
    """One closed-loop root rho and its eigenvalue mu = -rho^2."""

    rho: float
    mu: float


def _dhalf_kernel(s: float) -> float:
    """Derivative of sin(s)/(2s); series below |s|=1e-4."""
    if abs(s) < 1e-4:
        return -s / 6.0 + s**3 / 60.0
    return math.cos(s) / (2.0 * s) - math.sin(s) / (2.0 * s * s)


def _feedback_weights(sol: RiccatiSolution, basis: SpectralBasis, w: LqrWeights) -> np.ndarray:
    # c_i-weighted row contraction: fb(rho) = sum_i v_i * I(nu_i, rho)
    # with v_i = (beta^2/r) c_i sum_j P_ij phi_j(1).
    return (basis.beta**2 / w.r) * basis.cs * (sol.p @ basis.phi1)


def g_residual(rho: float, sol: RiccatiSolution, basis: SpectralBasis, w: LqrWeights) -> float:
    """Characteristic residual of the feedback boundary condition at rho."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    v = _feedback_weights(sol, basis, w)
    integrals = cosine_inner_product(basis.nus, rho)
    return float(
        rho * math.sin(rho) - basis.beta * math.cos(rho) - v @ integrals
    )


def g_residual_prime(rho: float, sol: RiccatiSolution, basis: SpectralBasis, w: LqrWeights) -> float:
    """Analytic d/drho of :func:`g_residual` (no finite differences)."""
    v = _feedback_weights(sol, basis, w)
    dints = np.array(
        [-_dhalf_kernel(nu - rho) + _dhalf_kernel(nu + rho) for nu in basis.nus]
    )
    return float(
        math.sin(rho)
        + rho * math.cos(rho)
        + basis.beta * math.sin(rho)
        - v @ dints
    )


def closed_loop_modes(
    sol: RiccatiSolution,
    basis: SpectralBasis,
    w: LqrWeights,
    count: int | None = None,
) -> list[ClosedLoopMode]:
    """Newton solve for the first ``count`` closed-loop roots.

    Each solve starts at ``1.05 nu_n`` with the analytic derivative.  A
    domain guard keeps iterates inside ``(n pi - pi/4, (n+1) pi)``; leaving
    it, or failing to converge in 100 steps, raises :class:`NewtonDiverged`
    (a sign the truncation is too coarse for that mode).
    """
    if count is None:
        count = basis.size
    if count > basis.size:
        raise ValueError("count exceeds basis size")
    out = []
    for n in range(count):
        lo = n * math.pi - math.pi / 4.0
        hi = (n + 1) * math.pi
        rho = 1.05 * basis.modes[n].nu
        ok = False
        for _ in range(_MAX_NEWTON_STEPS):
            f = g_residual(rho, sol, basis, w)
            fp = g_residual_prime(rho, sol, basis, w)
            if fp == 0.0:
                break
            step = f / fp
            cand = rho - step
            if not (lo < cand < hi):
                # damp the step: move halfway toward the violated boundary
                # instead of leaving the branch
                bound = lo if cand <= lo else hi
                cand = 0.5 * (rho + bound)
                if not (lo < cand < hi):
                    raise NewtonDiverged(
                        n, f"iterate left ({lo:.4f}, {hi:.4f}) for mode {n}"
                    )
            step = rho - cand
            rho = cand
            if abs(step) <= 1e-14 * (1.0 + rho) and abs(
                g_residual(rho, sol, basis, w)
            ) <= _RESIDUAL_TOL:
                ok = True
                break
        if not ok:
            raise NewtonDiverged(n)
        out.append(ClosedLoopMode(rho=rho, mu=-rho * rho))
    return out
