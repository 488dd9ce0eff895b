"""Ghost-point finite-difference model of the controlled rod and its LQR.

States are the samples ``zeta_k = z(k/n)`` for k = 0..n.  Fictitious points
outside each end impose the boundary conditions through centered first
differences, which folds the Neumann condition into row 0 and the actuated
Robin condition into row n:

    row 0:        n^2 (-2, 2, 0, ...)
    interior row: n^2 ( 1,-2, 1)
    row n:        n^2 ( ..., 2, -(2n + 2 beta)/n ),   input column 2 n beta.

The default state weight is the trapezoid mass matrix
``diag(0.5, 1, ..., 1, 0.5) / n`` so that ``zeta' Q zeta`` approximates the
integral of z^2 over the rod; with that scaling the discrete LQR matches the
spectral closed loop mode for mode.  An identity-Q variant is available for
experiments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_are, solve_continuous_lyapunov

from .exceptions import AreSolveFailure


@dataclass(frozen=True)
class DiscreteModel:
    """Grid model: linear dynamics, input vector, cost weights, reaction."""

    n: int
    beta: float
    alpha: float
    f: np.ndarray
    g: np.ndarray
    q: np.ndarray
    r: float

    @property
    def n_states(self) -> int:
        return self.n + 1


@dataclass(frozen=True)
class DiscreteLqr:
    """Stabilizing quadratic cost matrix and linear gain row."""

    v2: np.ndarray
    k1: np.ndarray


def trapezoid_weights(n: int) -> np.ndarray:
    """Quadrature masses of the grid nodes: 1/n interior, 1/(2n) at the ends."""
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.5 / n
    return w


def build_discrete(
    n: int,
    beta: float = 1.0,
    alpha: float = 1.0,
    r: float = 1.0,
    q: np.ndarray | None = None,
    identity_q: bool = False,
) -> DiscreteModel:
    """Assemble the grid model with the ghost-point boundary rows.

    ``q`` overrides the state weight entirely; ``identity_q`` swaps the
    default mass matrix for the identity.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if r <= 0:
        raise ValueError("r must be positive")
    s = n + 1
    f = np.zeros((s, s))
    f[0, 0], f[0, 1] = -2.0, 2.0
    for k in range(1, n):
        f[k, k - 1], f[k, k], f[k, k + 1] = 1.0, -2.0, 1.0
    f[n, n - 1] = 2.0
    f[n, n] = -(2.0 * n + 2.0 * beta) / n
    f *= n * n
    g = np.zeros(s)
    g[n] = 2.0 * n * beta
    if q is None:
        q = np.eye(s) if identity_q else np.diag(trapezoid_weights(n))
    else:
        q = np.asarray(q, dtype=float)
        if q.shape != (s, s):
            raise ValueError(f"q must be {s}x{s}")
    return DiscreteModel(n=n, beta=float(beta), alpha=float(alpha), f=f, g=g, q=q, r=float(r))


def solve_discrete_lqr(m: DiscreteModel, refine_steps: int = 2) -> DiscreteLqr:
    """Stabilizing solution of ``F'P + PF - P G G'P / r + Q = 0`` and its gain.

    The invariant-subspace solve is polished by a few Newton (Lyapunov)
    steps, which pushes the equation residual to rounding level; that
    matters downstream because the power-series expansion inherits any
    residual left in P.  Raises :class:`AreSolveFailure` if no stabilizing
    solution is isolated.
    """
    try:
        p = solve_continuous_are(m.f, m.g[:, None], m.q, np.array([[m.r]]))
    except Exception as exc:  # scipy raises LinAlgError or ValueError
        raise AreSolveFailure(str(exc)) from exc
    for _ in range(refine_steps):
        k = -(m.g @ p) / m.r
        acl = m.f + np.outer(m.g, k)
        try:
            p = solve_continuous_lyapunov(acl.T, -(m.q + np.outer(k, k) * m.r))
        except Exception as exc:
            raise AreSolveFailure(str(exc)) from exc
        p = 0.5 * (p + p.T)
    k1 = -(m.g @ p) / m.r
    closed = m.f + np.outer(m.g, k1)
    if np.linalg.eigvals(closed).real.max() >= 0.0:
        raise AreSolveFailure("closed-loop matrix is not Hurwitz")
    return DiscreteLqr(v2=p, k1=k1)


def closed_loop_matrix(m: DiscreteModel, lqr: DiscreteLqr) -> np.ndarray:
    return m.f + np.outer(m.g, lqr.k1)
