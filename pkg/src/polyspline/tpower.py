"""Multivariate truncated powers T(x|M) and exponential truncated powers E_c(x|M).

Two independent evaluators are provided: the explicit sum over invertible
``s x s`` column subsets (:func:`eval_T_explicit`) and Micchelli's
column-deletion recurrence (:func:`eval_T_recurrence`).

Cone membership convention
--------------------------
``T(.|M)`` is piecewise polynomial and may jump across chamber walls. Every
evaluator decides membership of ``x`` in ``cone(Y)`` at ``x + eps*v`` for an
infinitesimal ``eps > 0`` and a fixed tie-break direction ``v`` drawn from the
interior of ``cone(M)`` that lies on no hyperplane spanned by columns. Values
on walls are therefore one-sided limits, identical for every evaluator, and
equal to the true value wherever ``T`` is continuous.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

from .errors import (
    CertificateError,
    DimensionError,
    DomainError,
    RankError,
    SamplingExhaustedError,
)
from .exact import (
    RatMatrix,
    RatVector,
    as_vector,
    det,
    dot,
    inverse,
    particular_solution,
    rank,
    solve,
)

MAX_SAMPLING_ATTEMPTS = 2000


def _find_witness(M: RatMatrix) -> RatVector | None:
    cols = M.columns()
    s = M.nrows
    total = tuple(sum((c[i] for c in cols), Fraction(0)) for i in range(s))
    if all(dot(total, c) > 0 for c in cols):
        return total
    try:
        import numpy as np
        from scipy.optimize import linprog
    except ImportError:  # pragma: no cover
        return None
    # feasibility LP: M^T w >= 1, w free
    A = np.array([[float(q) for q in c] for c in cols])
    res = linprog(
        np.zeros(s),
        A_ub=-A,
        b_ub=-np.ones(len(cols)),
        bounds=[(None, None)] * s,
        method="highs",
    )
    if res.status != 0:
        return None
    for limit in (10**3, 10**6, 10**9):
        w = tuple(Fraction(float(v)).limit_denominator(limit) for v in res.x)
        if all(dot(w, c) > 0 for c in cols):
            return w
    return None


@dataclass(frozen=True)
class DirectionMatrix:
    """An ``s x n`` rank-``s`` matrix of nonzero columns spanning a pointed cone.

    ``witness`` is a vector with strictly positive inner product against every
    column. One is searched for when not supplied.
    """

    M: RatMatrix
    witness: RatVector = None

    def __post_init__(self):
        M = self.M if isinstance(self.M, RatMatrix) else RatMatrix.from_rows(self.M)
        object.__setattr__(self, "M", M)
        cols = M.columns()
        for j, c in enumerate(cols):
            if all(q == 0 for q in c):
                raise DomainError(f"column {j} is zero")
        if rank(M) != M.nrows:
            raise RankError(f"direction matrix of shape {M.shape} has rank < {M.nrows}")
        w = self.witness
        if w is None:
            w = _find_witness(M)
            if w is None:
                raise DomainError("columns do not span a pointed cone")
        w = as_vector(w)
        if len(w) != M.nrows:
            raise DimensionError("pointedness witness has wrong length")
        bad = [j for j, c in enumerate(cols) if dot(w, c) <= 0]
        if bad:
            raise DomainError(f"witness is not strictly positive on columns {bad}")
        object.__setattr__(self, "witness", w)

    @classmethod
    def from_rows(cls, rows, witness=None) -> DirectionMatrix:
        return cls(RatMatrix.from_rows(rows), witness)

    @property
    def s(self) -> int:
        return self.M.nrows

    @property
    def n(self) -> int:
        return self.M.ncols

    def sub(self, cols: Sequence[int]) -> DirectionMatrix:
        """Sub-multiset of columns; the witness stays valid but rank may drop."""
        return DirectionMatrix(self.M.select_columns(cols), self.witness)


@dataclass(frozen=True)
class _Basis:
    cols: tuple[int, ...]
    absdet: Fraction
    inv: RatMatrix
    # inv @ tie-break direction; no entry is zero
    tilt: RatVector


@dataclass(frozen=True)
class _BasisTable:
    M: RatMatrix
    tiebreak: RatVector
    bases: tuple[_Basis, ...]


def _invertible_subsets(M: RatMatrix):
    s, n = M.shape
    for cols in combinations(range(n), s):
        Y = M.select_columns(cols)
        d = det(Y)
        if d != 0:
            yield cols, Y, d


@lru_cache(maxsize=4096)
def _basis_table(M: RatMatrix, tiebreak: RatVector) -> _BasisTable:
    bases = []
    for cols, Y, d in _invertible_subsets(M):
        inv = inverse(Y)
        tilt = inv @ tiebreak
        if any(t == 0 for t in tilt):
            raise CertificateError("tie-break direction lies on a chamber wall")
        bases.append(_Basis(cols, abs(d), inv, tilt))
    return _BasisTable(M, tiebreak, tuple(bases))


@lru_cache(maxsize=1024)
def tiebreak_direction(M: RatMatrix) -> RatVector:
    """Deterministic interior direction of cone(M) off every column-spanned hyperplane."""
    rng = random.Random(0x5EED)
    cols = M.columns()
    s = M.nrows
    bases = [inverse(Y) for _, Y, _ in _invertible_subsets(M)]
    for attempt in range(1, MAX_SAMPLING_ATTEMPTS + 1):
        weights = [Fraction(rng.randint(8 * attempt, 16 * attempt), 8 * attempt) for _ in cols]
        v = tuple(sum((w * c[i] for w, c in zip(weights, cols)), Fraction(0)) for i in range(s))
        if all(all(t != 0 for t in inv @ v) for inv in bases):
            return v
    raise SamplingExhaustedError("no tie-break direction found")  # pragma: no cover


def _in_cone(basis: _Basis, x: RatVector) -> bool:
    for lam, tilt in zip(basis.inv @ x, basis.tilt):
        if lam < 0 or (lam == 0 and tilt < 0):
            return False
    return True


class PointClassification(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _check_point(M: DirectionMatrix, x) -> RatVector:
    x = as_vector(x)
    if len(x) != M.s:
        raise DimensionError(f"point has length {len(x)}, expected {M.s}")
    return x


def classify_point(M: DirectionMatrix, x) -> PointClassification:
    """Closed-cone classification by exact sign tests on ``Y^{-1} x``."""
    x = _check_point(M, x)
    inside = False
    for _, Y, _ in _invertible_subsets(M.M):
        lam = solve(Y, x)
        if all(v >= 0 for v in lam):
            inside = True
            if any(v == 0 for v in lam):
                return PointClassification.BOUNDARY
    return PointClassification.INTERIOR if inside else PointClassification.OUTSIDE


@dataclass(frozen=True)
class GenericVector:
    """A vector ``c`` certified to keep every denominator nonzero for ``matrix``."""

    c: RatVector
    matrix: RatMatrix = field(repr=False)


def _thetas(M: RatMatrix, c: RatVector):
    """Yield ``(cols, theta_Y, [theta_Y . y - c_y for y not in Y])``."""
    cols_all = M.columns()
    for cols, Y, _ in _invertible_subsets(M):
        theta = solve(Y.T, [c[j] for j in cols])
        rest = [dot(theta, cols_all[j]) - c[j] for j in range(M.ncols) if j not in cols]
        yield cols, theta, rest


def certify_generic(M: DirectionMatrix | RatMatrix, c) -> GenericVector:
    mat = M.M if isinstance(M, DirectionMatrix) else M
    c = as_vector(c)
    if len(c) != mat.ncols:
        raise DimensionError(f"c has length {len(c)}, expected {mat.ncols}")
    for cols, _, rest in _thetas(mat, c):
        if any(r == 0 for r in rest):
            raise CertificateError(f"c={[str(q) for q in c]} makes a denominator vanish for columns {cols}")
    return GenericVector(c, mat)


def _column_groups(M: RatMatrix) -> list[list[int]]:
    groups: dict[RatVector, list[int]] = {}
    for j, col in enumerate(M.columns()):
        groups.setdefault(col, []).append(j)
    return list(groups.values())


def _sample_c(M: RatMatrix, rng: random.Random) -> GenericVector:
    groups = _column_groups(M)
    for attempt in range(1, MAX_SAMPLING_ATTEMPTS + 1):
        hi = 8 * attempt
        if max(len(g) for g in groups) > hi:
            continue
        c = [Fraction(0)] * M.ncols
        for g in groups:
            for j, v in zip(g, rng.sample(range(1, hi + 1), len(g))):
                c[j] = Fraction(v)
        try:
            return certify_generic(M, c)
        except CertificateError:
            continue
    raise SamplingExhaustedError("could not sample a generic c")  # pragma: no cover


def sample_generic_c(M: DirectionMatrix, seed: int = 0) -> GenericVector:
    """Deterministic certified generic vector for ``M``.

    Attempt ``k`` draws integers from ``[1, 8k]``, distinct within each group
    of identical columns.
    """
    return _sample_c(M.M, random.Random(seed))


def _as_generic(M: RatMatrix, c) -> GenericVector:
    if isinstance(c, GenericVector) and c.matrix == M:
        return c
    return certify_generic(M, c.c if isinstance(c, GenericVector) else c)


@lru_cache(maxsize=4096)
def _coefficients(table: _BasisTable, c: RatVector) -> tuple[tuple[RatVector, Fraction], ...]:
    """Per basis ``(theta_Y, alpha_Y)`` with ``alpha_Y = prod (theta_Y.y - c_y)^-1``."""
    cols_all = table.M.columns()
    out = []
    for b in table.bases:
        theta = b.inv.T @ [c[j] for j in b.cols]
        alpha = Fraction(1)
        for j in range(table.M.ncols):
            if j not in b.cols:
                alpha /= dot(theta, cols_all[j]) - c[j]
        out.append((theta, alpha))
    return tuple(out)


def _explicit(table: _BasisTable, c: RatVector, x: RatVector) -> Fraction:
    s, n = table.M.shape
    k = n - s
    total = Fraction(0)
    for b, (theta, alpha) in zip(table.bases, _coefficients(table, c)):
        if _in_cone(b, x):
            total += alpha * dot(theta, x) ** k / b.absdet
    return total / math.factorial(k)


def _note_boundary(M: DirectionMatrix, x: RatVector, notes: list[str] | None) -> None:
    if notes is not None and classify_point(M, x) is PointClassification.BOUNDARY:
        notes.append(
            "point lies on a chamber wall; value is the one-sided limit along the tie-break direction"
        )


def eval_T_explicit(M: DirectionMatrix, x, c=None, *, notes: list[str] | None = None) -> Fraction:
    """Truncated power by the explicit sum over invertible column subsets.

    Uses ``alpha_Y = prod(theta_Y.y - c_y)^-1`` together with
    ``(+theta_Y.x)^(n-s)``; the result does not depend on ``c``.
    """
    x = _check_point(M, x)
    gc = sample_generic_c(M) if c is None else _as_generic(M.M, c)
    _note_boundary(M, x, notes)
    if dot(M.witness, x) < 0:
        return Fraction(0)
    table = _basis_table(M.M, tiebreak_direction(M.M))
    return _explicit(table, gc.c, x)


def eval_T_recurrence(M: DirectionMatrix, x, *, seed: int = 0, notes: list[str] | None = None) -> Fraction:
    """Truncated power by repeated column deletion.

    ``T(x|M) = (1/(n-s)) sum_j lambda_j T(x|M minus m_j)`` with ``M lambda = x``,
    applied while more than ``s + 1`` columns remain. Sub-multisets that lose
    rank contribute zero: their truncated power lives on a lower-dimensional
    set that the tie-break direction steers away from.
    """
    x = _check_point(M, x)
    _note_boundary(M, x, notes)
    if dot(M.witness, x) < 0:
        return Fraction(0)
    s = M.s
    tiebreak = tiebreak_direction(M.M)
    memo: dict[tuple[int, ...], Fraction] = {}
    degenerate = []

    def rec(cols: tuple[int, ...]) -> Fraction:
        if cols in memo:
            return memo[cols]
        sub = M.M.select_columns(cols)
        if rank(sub) < s:
            degenerate.append(cols)
            value = Fraction(0)
        elif len(cols) <= s + 1:
            table = _basis_table(sub, tiebreak)
            c = _sample_c(sub, random.Random(f"{seed}:{cols}"))
            value = _explicit(table, c.c, x)
        else:
            lam = particular_solution(sub, x)
            value = Fraction(0)
            for pos, l in enumerate(lam):
                if l != 0:
                    value += l * rec(cols[:pos] + cols[pos + 1 :])
            value /= len(cols) - s
        memo[cols] = value
        return value

    result = rec(tuple(range(M.n)))
    if degenerate and notes is not None:
        notes.append(f"{len(degenerate)} rank-deficient column subsets contributed 0")
    return result


@dataclass(frozen=True)
class ExpSum:
    """``sum coeff * exp(-exponent)`` with distinct exponents and nonzero coefficients."""

    terms: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def collect(cls, pairs) -> ExpSum:
        acc: dict[Fraction, Fraction] = {}
        for coeff, expo in pairs:
            acc[expo] = acc.get(expo, Fraction(0)) + coeff
        return cls(tuple(sorted(((c, e) for e, c in acc.items() if c != 0), key=lambda t: t[1])))

    def evaluate(self, exp: Callable = math.exp):
        return sum(c.numerator / c.denominator * exp(-e) for c, e in self.terms) if self.terms else 0.0

    def __float__(self) -> float:
        return float(self.evaluate())


def eval_E(M: DirectionMatrix, x, c) -> ExpSum:
    """Exponential truncated power ``E_c(x|M)`` as an exact exponential sum.

    Coefficients are ``prod(c_y - theta_Y.y)^-1 / |det Y|`` with exponent
    ``theta_Y . x``.
    """
    x = _check_point(M, x)
    gc = _as_generic(M.M, c)
    table = _basis_table(M.M, tiebreak_direction(M.M))
    sign = -1 if (M.n - M.s) % 2 else 1
    pairs = []
    for b, (theta, alpha) in zip(table.bases, _coefficients(table, gc.c)):
        if _in_cone(b, x):
            pairs.append((sign * alpha / b.absdet, dot(theta, x)))
    return ExpSum.collect(pairs)
