"""Power-series expansion of the grid optimal control problem.

Matching terms of equal total degree in the steady HJB identity

    0 = min_u [ grad(V)(zeta) . (F zeta + G u + f2(zeta)) + zeta'Q zeta + r u^2 ]

with ``f2(zeta)_k = alpha zeta_k^2`` produces, degree by degree, linear
"advect-along-the-closed-loop" equations for the cost coefficients and
explicit formulas for the feedback coefficients:

    degree 3:  grad(V3).(Acl z) = -grad(V2).f2          -> v3
               u2 = -(1/2r) G'.grad(V3)                 -> k2
    degree 4:  grad(V4).(Acl z) = -grad(V3).f2 + r u2^2 -> v4
               u3 = -(1/2r) G'.grad(V4)                 -> k3

where ``Acl = F + G k1``.  The cross terms ``[grad(V2).G + 2 r u1] u_d``
vanish identically by optimality of the linear gain, which is what decouples
each degree.  All solves go through dense monomial-coordinate operators
(:func:`rodlqr.symtensor.advect_operator`); since Acl is Hurwitz the
eigenvalue sums never vanish and the operators are invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import symtensor as st
from .exceptions import ResonanceError
from .finite_model import DiscreteLqr, DiscreteModel, closed_loop_matrix


@dataclass(frozen=True)
class HjbExpansion:
    """Taylor coefficients of the optimal cost (dense symmetric tensors)."""

    v2: np.ndarray
    v3: np.ndarray
    v4: np.ndarray | None = None


@dataclass(frozen=True)
class FeedbackLaw:
    """Polynomial state feedback ``u = k1.z + k2[z,z] + k3[z,z,z]``.

    ``degree`` is the highest active degree: 0 is open loop, 1 the plain
    LQR gain, 2 adds the quadratic term, 3 the cubic term.  Gain tensors are
    stored dense and fully symmetric.
    """

    degree: int
    k1: np.ndarray
    k2: np.ndarray | None = None
    k3: np.ndarray | None = None

    def __post_init__(self):
        if self.degree not in (0, 1, 2, 3):
            raise ValueError("degree must be 0, 1, 2 or 3")
        if self.degree >= 2 and self.k2 is None:
            raise ValueError("degree >= 2 requires k2")
        if self.degree >= 3 and self.k3 is None:
            raise ValueError("degree >= 3 requires k3")

    @property
    def n_states(self) -> int:
        return len(self.k1)

    @classmethod
    def open_loop(cls, n_states: int) -> "FeedbackLaw":
        return cls(degree=0, k1=np.zeros(n_states))

    def control(self, z: np.ndarray) -> float:
        """Evaluate the feedback polynomial at a state."""
        if self.degree == 0:
            return 0.0
        u = float(self.k1 @ z)
        if self.degree >= 2:
            u += float(z @ self.k2 @ z)
        if self.degree >= 3:
            u += float(np.einsum("ijk,i,j,k->", self.k3, z, z, z))
        return u


def _reaction_grad_poly(grads: list[st.Poly], alpha: float, scale: float = 1.0) -> st.Poly:
    """Polynomial ``scale * sum_m dV/dz_m * alpha z_m^2`` from gradient polys."""
    out: st.Poly = {}
    for m, gm in enumerate(grads):
        for mon, c in gm.items():
            key = tuple(sorted(mon + (m, m)))
            out[key] = out.get(key, 0.0) + scale * alpha * c
    return out


def _control_from_gradient(grads: list[st.Poly], g: np.ndarray, r: float) -> st.Poly:
    """``-(1/2r) G' . grad(V)`` as a polynomial in the state."""
    out: st.Poly = {}
    for m, gm in enumerate(grads):
        if g[m] == 0.0:
            continue
        st.poly_add(out, gm, -(0.5 / r) * g[m])
    return out


def _solve_degree(acl: np.ndarray, rhs: st.Poly, degree: int) -> tuple[np.ndarray, list]:
    mat, mons, index = st.advect_operator(acl, degree)
    vec = np.zeros(len(mons))
    for mon, c in rhs.items():
        vec[index[mon]] += c
    try:
        sol = np.linalg.solve(mat, vec)
    except np.linalg.LinAlgError as exc:
        raise ResonanceError(str(exc)) from exc
    return sol, mons


def albrekht_expand(
    m: DiscreteModel, lqr: DiscreteLqr, degree: int = 3
) -> tuple[HjbExpansion, FeedbackLaw]:
    """Cost and feedback coefficients through the requested feedback degree.

    ``degree=2`` returns (v2, v3) with the quadratic gain; ``degree=3`` also
    solves the quartic cost equation and returns the cubic gain.  With
    ``alpha == 0`` all corrections vanish and the law reduces to the LQR.
    """
    if degree not in (2, 3):
        raise ValueError("degree must be 2 or 3")
    s = m.n_states
    acl = closed_loop_matrix(m, lqr)

    # degree 3 cost: forcing -grad(V2).f2 with grad(V2) = 2 P z
    grad_v2 = [
        {(i,): 2.0 * lqr.v2[mm, i] for i in range(s) if lqr.v2[mm, i] != 0.0}
        for mm in range(s)
    ]
    rhs3 = _reaction_grad_poly(grad_v2, m.alpha, scale=-1.0)
    v3_vec, mons3 = _solve_degree(acl, rhs3, 3)
    v3_poly = {mon: c for mon, c in zip(mons3, v3_vec) if c != 0.0}
    grad_v3 = st.poly_grad(v3_poly, s)
    u2_poly = _control_from_gradient(grad_v3, m.g, m.r)
    k2 = st.poly_to_tensor(u2_poly, s, 2) if u2_poly else np.zeros((s, s))
    v3 = st.poly_to_tensor(v3_poly, s, 3) if v3_poly else np.zeros((s, s, s))

    if degree == 2:
        law = FeedbackLaw(degree=2, k1=lqr.k1.copy(), k2=k2)
        return HjbExpansion(v2=lqr.v2, v3=v3, v4=None), law

    # degree 4 cost: forcing -grad(V3).f2 + r u2^2
    rhs4 = _reaction_grad_poly(grad_v3, m.alpha, scale=-1.0)
    st.poly_add(rhs4, st.poly_mul(u2_poly, u2_poly), m.r)
    v4_vec, mons4 = _solve_degree(acl, rhs4, 4)
    v4_poly = {mon: c for mon, c in zip(mons4, v4_vec) if c != 0.0}
    grad_v4 = st.poly_grad(v4_poly, s)
    u3_poly = _control_from_gradient(grad_v4, m.g, m.r)
    k3 = st.poly_to_tensor(u3_poly, s, 3) if u3_poly else np.zeros((s, s, s))
    v4 = st.poly_to_tensor(v4_poly, s, 4) if v4_poly else np.zeros((s,) * 4)

    law = FeedbackLaw(degree=3, k1=lqr.k1.copy(), k2=k2, k3=k3)
    return HjbExpansion(v2=lqr.v2, v3=v3, v4=v4), law


def hjb_residual_poly(m: DiscreteModel, exp: HjbExpansion, law: FeedbackLaw) -> st.Poly:
    """Exact monomial expansion of the HJB residual for (cost, feedback).

    Assembling the residual as a polynomial and evaluating with compensated
    summation sidesteps the catastrophic cancellation that a direct
    evaluation suffers at small states, where the residual is many orders
    below the individual terms.
    """
    s = m.n_states
    u_poly: st.Poly = {(i,): law.k1[i] for i in range(s) if law.k1[i] != 0.0}
    if law.degree >= 2:
        st.poly_add(u_poly, st.tensor_to_poly(law.k2))
    if law.degree >= 3:
        st.poly_add(u_poly, st.tensor_to_poly(law.k3))

    grad_v = []
    v3_grads = st.poly_grad(st.tensor_to_poly(exp.v3), s)
    v4_grads = (
        st.poly_grad(st.tensor_to_poly(exp.v4), s) if exp.v4 is not None else None
    )
    for mm in range(s):
        gm: st.Poly = {(i,): 2.0 * exp.v2[mm, i] for i in range(s) if exp.v2[mm, i] != 0.0}
        st.poly_add(gm, v3_grads[mm])
        if v4_grads is not None:
            st.poly_add(gm, v4_grads[mm])
        grad_v.append(gm)

    residual: st.Poly = {}
    for mm in range(s):
        fm: st.Poly = {(i,): m.f[mm, i] for i in range(s) if m.f[mm, i] != 0.0}
        if m.g[mm] != 0.0:
            st.poly_add(fm, u_poly, m.g[mm])
        if m.alpha != 0.0:
            fm[(mm, mm)] = fm.get((mm, mm), 0.0) + m.alpha
        st.poly_add(residual, st.poly_mul(grad_v[mm], fm))
    for i in range(s):
        for j in range(s):
            if m.q[i, j] != 0.0:
                key = tuple(sorted((i, j)))
                residual[key] = residual.get(key, 0.0) + m.q[i, j]
    st.poly_add(residual, st.poly_mul(u_poly, u_poly), m.r)
    return residual


def hjb_residual(m: DiscreteModel, exp: HjbExpansion, law: FeedbackLaw, z: np.ndarray) -> float:
    """HJB residual at one state (see :func:`hjb_residual_poly`)."""
    return st.poly_eval(hjb_residual_poly(m, exp, law), np.asarray(z, dtype=float))
