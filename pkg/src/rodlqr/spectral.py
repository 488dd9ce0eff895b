"""Truncated eigenbasis of d^2/dx^2 on [0,1] with a Neumann condition at x=0
and a Robin condition at x=1.

The eigenfunctions are ``phi_n(x) = c_n cos(nu_n x)`` where ``nu_n`` is the
unique root of ``nu sin(nu) = beta cos(nu)`` in the interval
``(n pi, (n + 1/2) pi)`` and ``c_n`` normalizes phi_n to unit L2 norm.  The
eigenvalues are ``lambda_n = -nu_n**2``, so the uncontrolled rod is stable
for every ``beta > 0``.

All inner products of cosines are evaluated with the closed-form antiderivative
(:func:`cosine_inner_product`); numerical quadrature appears only in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import BracketingError

#: Default relative tolerance for eigenvalue root finding.
DEFAULT_TOL = 1e-12

#: Default truncation order (mode indices 0..10).
DEFAULT_MODES = 11

# Offset keeping the root search strictly inside the open bracket.
_BRACKET_EPS = 1e-8


@dataclass(frozen=True)
class ModeData:
    """One eigenmode: root, eigenvalue, normalization, endpoint value."""

    nu: float
    lam: float
    c: float
    phi_at_1: float


@dataclass(frozen=True)
class SpectralBasis:
    """Immutable N-mode truncation of the open-loop eigenbasis.

    Attributes
    ----------
    beta : float
        Robin/actuation coefficient at x=1.
    modes : tuple of ModeData
        Modes ordered by increasing ``nu``.
    """

    beta: float
    modes: tuple[ModeData, ...]

    @property
    def size(self) -> int:
        return len(self.modes)

    @cached_property
    def nus(self) -> np.ndarray:
        return np.array([m.nu for m in self.modes])

    @cached_property
    def lams(self) -> np.ndarray:
        return np.array([m.lam for m in self.modes])

    @cached_property
    def cs(self) -> np.ndarray:
        return np.array([m.c for m in self.modes])

    @cached_property
    def phi1(self) -> np.ndarray:
        """Endpoint values phi_n(1)."""
        return np.array([m.phi_at_1 for m in self.modes])

    def eval_modes(self, x) -> np.ndarray:
        """Evaluate all eigenfunctions at points ``x``.

        Returns an array of shape ``(N, len(x))`` with entries phi_n(x_k).
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.cs[:, None] * np.cos(np.outer(self.nus, x))

    def gram_matrix(self) -> np.ndarray:
        """N x N matrix of L2 inner products of the normalized eigenfunctions."""
        raw = cosine_inner_product(self.nus[:, None], self.nus[None, :])
        return np.outer(self.cs, self.cs) * raw


def _char(nu: float, beta: float) -> float:
    return nu * math.sin(nu) - beta * math.cos(nu)


def _char_prime(nu: float, beta: float) -> float:
    return math.sin(nu) + nu * math.cos(nu) + beta * math.sin(nu)


def find_nu(n: int, beta: float, tol: float = DEFAULT_TOL) -> float:
    """Root of ``nu sin(nu) = beta cos(nu)`` in ``(n pi, (n + 1/2) pi)``.

    Safeguarded Newton iteration: steps that leave the current bracket are
    replaced by bisection, so convergence is guaranteed even though Newton
    supplies the usual quadratic end game.  Deterministic for fixed inputs.

    Parameters
    ----------
    n : int
        Mode index (>= 0).
    beta : float
        Robin coefficient (> 0).
    tol : float
        Relative tolerance on the root location.
    """
    if n < 0:
        raise ValueError("mode index must be nonnegative")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")

    hi_end = (n + 0.5) * math.pi
    # The root sits ~beta/nu above n*pi for small beta and ~nu/beta below
    # (n+1/2)*pi for large beta; shrink the bracket insets so they never
    # swallow it.
    lo_inset = min(_BRACKET_EPS, 0.25 * beta / max(hi_end, 1.0))
    hi_inset = min(_BRACKET_EPS, 0.25 * hi_end / beta)
    lo = n * math.pi + max(lo_inset, 5e-16 * n * math.pi)
    hi = hi_end - max(hi_inset, 5e-16 * hi_end)
    flo, fhi = _char(lo, beta), _char(hi, beta)
    # g(n*pi+) = -beta cos(n*pi) * (1 + o(1)) and g((n+1/2)*pi-) ~ nu sin: opposite signs.
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketingError(
            f"no sign change in ({lo}, {hi}) for beta={beta}; "
            "a root is guaranteed here, so this is an internal bug"
        )

    nu = 0.5 * (lo + hi)
    for _ in range(200):
        f = _char(nu, beta)
        if f == 0.0:
            return nu
        if f * flo < 0.0:
            hi = nu
        else:
            lo, flo = nu, f
        width = hi - lo
        # convert the residual target tol*(1+nu) into an argument width via
        # the local slope, with a machine-precision floor
        slope = max(abs(_char_prime(nu, beta)), 1.0)
        target = max(0.25 * tol * (1.0 + nu) / slope, 4e-16 * (1.0 + nu))
        if width <= target:
            return 0.5 * (lo + hi)
        fp = _char_prime(nu, beta)
        step_ok = False
        if fp != 0.0:
            cand = nu - f / fp
            if lo < cand < hi:
                nu = cand
                step_ok = True
        if not step_ok:
            nu = 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def normalization(nu: float) -> float:
    """Normalization constant giving ``c cos(nu x)`` unit L2 norm on [0,1].

    The sign follows sign(cos(nu)), which makes phi_n(1) > 0 for roots in
    the standard brackets.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    return math.copysign(
        math.sqrt(4.0 * nu / (2.0 * nu + math.sin(2.0 * nu))), math.cos(nu)
    )


def _half_kernel(s):
    """sin(s)/(2 s) with its removable singularity filled in.

    Series evaluation below |s| = 1e-4 keeps full double accuracy through
    the singular point.
    """
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < 1e-4
    safe = np.where(small, 1.0, s)
    out = np.where(small, 0.5 - s * s / 12.0 + s**4 / 240.0, np.sin(safe) / (2.0 * safe))
    return out if out.ndim else float(out)


def cosine_inner_product(a, b):
    """Closed form of ``integral_0^1 cos(a x) cos(b x) dx``.

    Equals ``sin(a-b)/(2(a-b)) + sin(a+b)/(2(a+b))`` with both terms
    continued through their removable singularities.  Accepts scalars or
    broadcastable arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return _half_kernel(a - b) + _half_kernel(a + b)


def build_basis(beta: float, n_modes: int = DEFAULT_MODES, tol: float = DEFAULT_TOL) -> SpectralBasis:
    """Construct the truncated basis for the given actuation coefficient.

    Parameters
    ----------
    beta : float
        Robin coefficient (> 0).
    n_modes : int
        Truncation order N (>= 1); mode indices run 0..N-1.
    tol : float
        Root-finding tolerance passed to :func:`find_nu`.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    modes = []
    for n in range(n_modes):
        nu = find_nu(n, beta, tol)
        c = normalization(nu)
        modes.append(ModeData(nu=nu, lam=-nu * nu, c=c, phi_at_1=c * math.cos(nu)))
    return SpectralBasis(beta=float(beta), modes=tuple(modes))
