"""Monomial-coordinate polynomials and symmetric tensor storage.

A homogeneous degree-d polynomial in s variables is stored as a dict mapping
sorted index tuples (canonical monomials) to coefficients, so
``V(z) = sum_gamma coeff[gamma] * prod(z[i] for i in gamma)``.  The matching
dense symmetric tensor has ``T[perm(gamma)] = coeff[gamma] / multiplicity``.

These utilities back both the grid-level power-series expansion and the
feedback-law file format.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

Poly = dict  # tuple[int, ...] -> float


def monomials(n_vars: int, degree: int) -> list[tuple[int, ...]]:
    """Canonical (sorted) index tuples of all degree-d monomials."""
    return list(itertools.combinations_with_replacement(range(n_vars), degree))


def multiplicity(mon: tuple[int, ...]) -> int:
    """Number of distinct orderings of a monomial's indices."""
    counts = Counter(mon)
    m = math.factorial(len(mon))
    for c in counts.values():
        m //= math.factorial(c)
    return m


def poly_add(dst: Poly, src: Poly, scale: float = 1.0) -> None:
    for mon, c in src.items():
        dst[mon] = dst.get(mon, 0.0) + scale * c


def poly_mul(p1: Poly, p2: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            key = tuple(sorted(m1 + m2))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def poly_grad(p: Poly, n_vars: int) -> list[Poly]:
    """Partial derivatives, one polynomial per variable."""
    grads: list[Poly] = [dict() for _ in range(n_vars)]
    for mon, coef in p.items():
        if coef == 0.0:
            continue
        for var in set(mon):
            cnt = mon.count(var)
            rest = list(mon)
            rest.remove(var)
            key = tuple(rest)
            grads[var][key] = grads[var].get(key, 0.0) + cnt * coef
    return grads


def poly_eval(p: Poly, z: np.ndarray) -> float:
    """Compensated evaluation (exact summation of the term values)."""
    terms = []
    for mon, c in p.items():
        v = c
        for i in mon:
            v *= z[i]
        terms.append(v)
    return math.fsum(terms)


def poly_to_tensor(p: Poly, n_vars: int, degree: int) -> np.ndarray:
    """Dense symmetric tensor of a homogeneous polynomial."""
    t = np.zeros((n_vars,) * degree)
    for mon, c in p.items():
        if len(mon) != degree:
            raise ValueError(f"monomial {mon} is not degree {degree}")
        share = c / multiplicity(mon)
        for perm in set(itertools.permutations(mon)):
            t[perm] = share
    return t


def tensor_to_poly(t: np.ndarray) -> Poly:
    """Canonical monomial coefficients of a dense symmetric tensor."""
    degree = t.ndim
    n_vars = t.shape[0]
    out: Poly = {}
    for mon in monomials(n_vars, degree):
        v = t[mon]
        if v != 0.0:
            out[mon] = v * multiplicity(mon)
    return out


def tensor_sym_error(t: np.ndarray) -> float:
    """Max deviation of a tensor from full index-permutation symmetry."""
    worst = 0.0
    for perm in itertools.permutations(range(t.ndim)):
        worst = max(worst, float(np.abs(t - np.transpose(t, perm)).max()))
    return worst


def advect_operator(a: np.ndarray, degree: int):
    """Matrix of ``V -> grad(V) . (A z)`` on degree-d monomial coefficients.

    The coefficient of monomial gamma feeds monomial ``gamma - e_m + e_i``
    with weight ``gamma_m * A[m, i]``; assembling those transitions gives a
    dense square matrix over the canonical monomials.  Returns
    ``(matrix, monomial list, index lookup)``.
    """
    n_vars = a.shape[0]
    mons = monomials(n_vars, degree)
    index = {m: i for i, m in enumerate(mons)}
    mat = np.zeros((len(mons), len(mons)))
    for col, gamma in enumerate(mons):
        for var in set(gamma):
            cnt = gamma.count(var)
            rest = list(gamma)
            rest.remove(var)
            for i in range(n_vars):
                aval = a[var, i]
                if aval != 0.0:
                    row = index[tuple(sorted(rest + [i]))]
                    mat[row, col] += cnt * aval
    return mat, mons, index
