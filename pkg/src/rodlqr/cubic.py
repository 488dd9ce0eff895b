"""Cubic term of the optimal cost and the quadratic feedback gain in the
spectral basis, for the reaction term ``alpha z^2`` added to the rod.

Projected on the eigenbasis, the elliptic equation for the symmetric cubic
kernel becomes, for every index triple (a, b, c),

    0 = (lam_a + lam_b + lam_c) T_abc
        - w_a (T g)_bc - w_b (T g)_ac - w_c (T g)_ab
        + (2 alpha / 3) (P_ab d_ac + P_bc d_ba + P_ca d_cb),

with ``g_m = phi_m(1)``, ``w = (beta^2/r) P g`` (the closed-loop boundary
coupling through the linear gain) and d the Kronecker delta.  This is one
dense linear system in the N(N+1)(N+2)/6 canonical entries of T, and the
linear gain pairs with it to produce the quadratic feedback kernel
``K(x1, x2) = -(3 beta / 2 r) T(x1, x2, 1)``.

The equation is linear in the forcing, hence exactly linear in alpha.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import SingularSystem
from .riccati import LqrWeights, RiccatiSolution
from .spectral import SpectralBasis


@dataclass(frozen=True)
class CubicCostTensor:
    """Symmetric N x N x N coefficient tensor of the cubic cost term."""

    alpha: float
    t: np.ndarray


@dataclass(frozen=True)
class QuadraticGain:
    """Symmetric N x N coefficients of the quadratic feedback kernel."""

    k2: np.ndarray


def _canonical_triples(n: int) -> list[tuple[int, int, int]]:
    return list(itertools.combinations_with_replacement(range(n), 3))


def _expand_symmetric(values, triples, n: int) -> np.ndarray:
    t = np.zeros((n, n, n))
    for (a, b, c), v in zip(triples, values):
        for p in set(itertools.permutations((a, b, c))):
            t[p] = v
    return t


def _symmetrize(t: np.ndarray) -> np.ndarray:
    # Average over all 6 axis orders; a no-op for an already symmetric tensor
    # but it guards against any assembly asymmetry.
    acc = np.zeros_like(t)
    for perm in itertools.permutations(range(3)):
        acc += np.transpose(t, perm)
    return acc / 6.0


def _forcing(p: np.ndarray, alpha: float) -> np.ndarray:
    n = p.shape[0]
    f = np.zeros((n, n, n))
    scale = 2.0 * alpha / 3.0
    for a in range(n):
        for b in range(n):
            f[a, b, a] += scale * p[a, b]   # P_ab delta_ac
            f[a, a, b] += scale * p[a, b]   # P_bc delta_ba  (b=a slice)
            f[b, a, a] += scale * p[b, a]   # P_ca delta_cb  (c=a slice)
    return f


def tensor_equation_residual(
    ct: CubicCostTensor, sol: RiccatiSolution, basis: SpectralBasis, w: LqrWeights
) -> float:
    """Max-norm residual of the projected elliptic equation over all triples."""
    lam = basis.lams
    g = basis.phi1
    wv = (basis.beta**2 / w.r) * (sol.p @ g)
    t = ct.t
    tg = np.einsum("mbc,m->bc", t, g)
    lhs = (lam[:, None, None] + lam[None, :, None] + lam[None, None, :]) * t
    lhs -= wv[:, None, None] * tg[None, :, :]
    lhs -= wv[None, :, None] * tg[:, None, :]
    lhs -= wv[None, None, :] * tg[:, :, None]
    lhs += _forcing(sol.p, ct.alpha)
    return float(np.abs(lhs).max())


def solve_cubic_tensor(
    sol: RiccatiSolution, basis: SpectralBasis, w: LqrWeights, alpha: float
) -> CubicCostTensor:
    """Assemble and solve the dense system over canonical index triples.

    Raises :class:`SingularSystem` if the operator is numerically singular
    (would indicate a resonance between the eigenvalue sums and the boundary
    feedback; cannot occur while all eigenvalues are negative).
    """
    n = basis.size
    lam = basis.lams
    g = basis.phi1
    wv = (basis.beta**2 / w.r) * (sol.p @ g)

    triples = _canonical_triples(n)
    index = {t: i for i, t in enumerate(triples)}
    dim = len(triples)
    mat = np.zeros((dim, dim))
    rhs = np.zeros(dim)

    forcing = _forcing(sol.p, alpha)
    for row, (a, b, c) in enumerate(triples):
        mat[row, row] += lam[a] + lam[b] + lam[c]
        for (one, two, three) in ((a, b, c), (b, a, c), (c, a, b)):
            coeff = -wv[one]
            for m in range(n):
                col = index[tuple(sorted((m, two, three)))]
                mat[row, col] += coeff * g[m]
        rhs[row] = -forcing[a, b, c]

    try:
        values = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc

    t = _symmetrize(_expand_symmetric(values, triples, n))
    return CubicCostTensor(alpha=float(alpha), t=t)


def quadratic_gain(ct: CubicCostTensor, basis: SpectralBasis, w: LqrWeights) -> QuadraticGain:
    """Quadratic feedback coefficients ``k2 = -(3 beta / 2 r) (T g)``."""
    k2 = -(1.5 * basis.beta / w.r) * np.einsum("abc,c->ab", ct.t, basis.phi1)
    return QuadraticGain(k2=k2)


def evaluate_quadratic_gain(basis: SpectralBasis, gain: QuadraticGain, x1, x2):
    """Pointwise kernel values K(x1, x2) = sum k2_ab phi_a(x1) phi_b(x2)."""
    f1 = basis.eval_modes(x1)
    f2 = basis.eval_modes(x2)
    vals = f1.T @ gain.k2 @ f2
    if np.ndim(x1) == 0 and np.ndim(x2) == 0:
        return float(vals[0, 0])
    return vals


def cubic_cost_of_state(
    sol: RiccatiSolution, ct: CubicCostTensor, z0_coeffs: np.ndarray
) -> float:
    """Optimal cost through third order: z'Pz plus the cubic correction."""
    z0 = np.asarray(z0_coeffs, dtype=float)
    quad = float(z0 @ sol.p @ z0)
    cub = float(np.einsum("ijk,i,j,k->", ct.t, z0, z0, z0))
    return quad + cub
