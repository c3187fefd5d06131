"""Exact integration of polynomials over polytopes via column lifting.

Repeating column ``m_j`` of ``M`` exactly ``k_j + 1`` times turns the
integral of ``u^k`` over the fiber ``{u >= 0 : M u = x}`` into
``k! * sqrt(det M M^T) * T(x | M^k)``.

For ``D(b) = {x >= 0 : A x <= b}`` the fiber of ``(A, I)`` over ``b`` is the
graph of ``x -> b - A x``. Its area element ``sqrt(det(I + A^T A)) dx`` is
exactly the Gram factor, so the factor cancels and
``int_D x^k dx = k! * T(b | (A, I)^(k, 0))`` is rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, DomainError, SizeError
from .exact import RadicalValue, as_rat, gram_det, radical_normalize
from .polytope import HPolytope, stacked_direction_matrix
from .tpower import DirectionMatrix, eval_T_explicit

# Bounds the C(N, s) subset enumeration of the lifted matrix.
MAX_LIFTED_COLUMNS = 24


def _exponents(k: Iterable[int], n: int) -> tuple[int, ...]:
    k = tuple(k)
    if len(k) != n:
        raise DimensionError(f"exponent vector has length {len(k)}, expected {n}")
    if any(not isinstance(e, int) or isinstance(e, bool) or e < 0 for e in k):
        raise DomainError(f"exponents must be nonnegative integers, got {k}")
    return k


def k_factorial(k: Sequence[int]) -> int:
    return math.prod(math.factorial(e) for e in k)


def lift_exponents(M: DirectionMatrix, k: Sequence[int]) -> DirectionMatrix:
    """``M^k``: column ``j`` repeated ``k_j + 1`` times, same witness."""
    k = _exponents(k, M.n)
    cols = [j for j, e in enumerate(k) for _ in range(e + 1)]
    return DirectionMatrix(M.M.select_columns(cols), M.witness)


def _check_size(M: DirectionMatrix, k: Sequence[int], cap: int) -> None:
    total = M.n + sum(k)
    if total > cap:
        raise SizeError(
            f"lifted matrix would have {total} columns (cap {cap}); "
            "lower the degree or evaluate the lifted truncated power with eval_T_recurrence"
        )


def integrate_monomial_fiber(
    M: DirectionMatrix, x, k: Sequence[int], *, cap: int = MAX_LIFTED_COLUMNS, notes=None
) -> RadicalValue:
    """``int_P prod u_j^k_j du`` over ``P = {u >= 0 : M u = x}`` (intrinsic measure)."""
    k = _exponents(k, M.n)
    _check_size(M, k, cap)
    t = eval_T_explicit(lift_exponents(M, k), x, notes=notes)
    return radical_normalize(k_factorial(k) * t, gram_det(M.M))


def integrate_monomial_hrep(
    H: HPolytope, k: Sequence[int], *, cap: int = MAX_LIFTED_COLUMNS, notes=None
) -> Fraction:
    """``int_{D(b)} prod x_j^k_j dx`` for ``D(b) = {x >= 0 : A x <= b}``.

    ``k`` may also have length ``d + s`` to weight by powers of the slacks
    ``b_i - a_i . x``; those slacks refer to the rows as given in ``H``.
    """
    M, b = stacked_direction_matrix(H)
    d, s = H.dim, H.A.nrows
    if len(k) == d:
        k = tuple(k) + (0,) * s
    k = _exponents(k, d + s)
    _check_size(M, k, cap)
    value = k_factorial(k) * eval_T_explicit(lift_exponents(M, k), b, notes=notes)
    # integer row scaling multiplied each slack by the row's scale factor
    for i, row in enumerate(H.A.rows):
        if k[d + i]:
            value /= Fraction(math.lcm(*(q.denominator for q in row))) ** k[d + i]
    return value


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial: ``sum coeff * x^exponents`` with merged terms."""

    terms: tuple[tuple[Fraction, tuple[int, ...]], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[object, Sequence[int]]]) -> Polynomial:
        acc: dict[tuple[int, ...], Fraction] = {}
        nvars = None
        for coeff, exps in terms:
            exps = tuple(exps)
            if nvars is None:
                nvars = len(exps)
            elif len(exps) != nvars:
                raise DimensionError("all terms must have the same number of variables")
            _exponents(exps, len(exps))
            acc[exps] = acc.get(exps, Fraction(0)) + as_rat(coeff)
        return cls(tuple(sorted(((c, e) for e, c in acc.items() if c != 0), key=lambda t: t[1])))

    @property
    def nvars(self) -> int | None:
        return len(self.terms[0][1]) if self.terms else None

    def __call__(self, x: Sequence) -> Fraction:
        return sum((c * math.prod(xi**e for xi, e in zip(x, exps)) for c, exps in self.terms), Fraction(0))


def integrate_polynomial_hrep(H: HPolytope, p: Polynomial, **kw) -> Fraction:
    if p.nvars not in (None, H.dim):
        raise DimensionError(f"polynomial has {p.nvars} variables, polytope has {H.dim}")
    return sum((c * integrate_monomial_hrep(H, e, **kw) for c, e in p.terms), Fraction(0))
