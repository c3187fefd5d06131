"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`. Matrices are immutable
:class:`RatMatrix` instances so they can key caches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DimensionError, DomainError, RankError, SingularMatrixError

Rat = Fraction
RatVector = tuple[Fraction, ...]

# Squarefree extraction stops trial division here.
TRIAL_DIVISION_BOUND = 10**6


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently inject rounding error.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    raise DomainError(f"not an exact rational: {value!r}")


def as_vector(values: Iterable) -> RatVector:
    return tuple(as_rat(v) for v in values)


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"length mismatch {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (q.denominator for q in values), 1)


@dataclass(frozen=True)
class RatMatrix:
    """Dense row-major rational matrix."""

    rows: tuple[RatVector, ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise DimensionError("matrix dimensions must be positive")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise DimensionError("ragged matrix rows")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> RatMatrix:
        return cls(tuple(as_vector(r) for r in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> RatMatrix:
        cols = [as_vector(c) for c in columns]
        if not cols:
            raise DimensionError("matrix dimensions must be positive")
        return cls(tuple(zip(*cols)))

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> RatVector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[RatVector]:
        return [self.column(j) for j in range(self.ncols)]

    def select_columns(self, idx: Sequence[int]) -> RatMatrix:
        return RatMatrix(tuple(tuple(r[j] for j in idx) for r in self.rows))

    def hstack(self, other: RatMatrix) -> RatMatrix:
        if self.nrows != other.nrows:
            raise DimensionError("hstack needs equal row counts")
        return RatMatrix(tuple(a + b for a, b in zip(self.rows, other.rows)))

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.ncols != other.nrows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return RatMatrix(tuple(tuple(dot(r, c) for c in cols) for r in self.rows))
        vec = as_vector(other)
        if len(vec) != self.ncols:
            raise DimensionError(f"cannot multiply {self.shape} by vector of length {len(vec)}")
        return tuple(dot(r, vec) for r in self.rows)

    def is_integral(self) -> bool:
        return all(q.denominator == 1 for r in self.rows for q in r)

    def to_strings(self) -> list[list[str]]:
        return [[format_rat(q) for q in r] for r in self.rows]


def _as_matrix(Y) -> RatMatrix:
    return Y if isinstance(Y, RatMatrix) else RatMatrix.from_rows(Y)


def _bareiss_int(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def det(Y) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rational rows are first scaled to integers; the scale is divided out at
    the end.
    """
    Y = _as_matrix(Y)
    n, m = Y.shape
    if n != m:
        raise DimensionError(f"determinant of non-square {n}x{m} matrix")
    scale = 1
    rows = []
    for r in Y.rows:
        k = lcm_of_denominators(r)
        scale *= k
        rows.append([int(q * k) for q in r])
    return Fraction(_bareiss_int(rows), scale)


def _row_reduce(rows: list[list[Fraction]], ncols: int) -> list[int]:
    """In-place reduced row echelon form; returns the pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(Y) -> int:
    Y = _as_matrix(Y)
    return len(_row_reduce([list(r) for r in Y.rows], Y.ncols))


def solve(Y, x: Sequence) -> RatVector:
    """Exact solution of ``Y u = x`` for square invertible ``Y``."""
    Y = _as_matrix(Y)
    n, m = Y.shape
    if n != m:
        raise DimensionError(f"solve needs a square matrix, got {n}x{m}")
    x = as_vector(x)
    if len(x) != n:
        raise DimensionError(f"right-hand side has length {len(x)}, expected {n}")
    rows = [list(r) + [xi] for r, xi in zip(Y.rows, x)]
    pivots = _row_reduce(rows, n)
    if len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return tuple(rows[i][n] for i in range(n))


def inverse(Y) -> RatMatrix:
    Y = _as_matrix(Y)
    n, m = Y.shape
    if n != m:
        raise DimensionError(f"inverse of non-square {n}x{m} matrix")
    eye = RatMatrix.identity(n).rows
    rows = [list(r) + list(e) for r, e in zip(Y.rows, eye)]
    if len(_row_reduce(rows, n)) < n:
        raise SingularMatrixError("matrix is singular")
    return RatMatrix(tuple(tuple(r[n:]) for r in rows))


def particular_solution(Y, x: Sequence) -> RatVector | None:
    """Solution of ``Y u = x`` with non-pivot coordinates set to zero.

    Pivots are chosen left to right, so the support is the first maximal
    independent set of columns. Returns None when the system is inconsistent.
    """
    Y = _as_matrix(Y)
    x = as_vector(x)
    n = Y.ncols
    rows = [list(r) + [xi] for r, xi in zip(Y.rows, x)]
    pivots = _row_reduce(rows, n + 1)
    if n in pivots:
        return None
    u = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        u[c] = rows[i][n]
    return tuple(u)


def kernel_vector(rows: Sequence[Sequence[Fraction]], d: int) -> RatVector | None:
    """A nonzero solution of ``R y = 0`` for ``d`` unknowns, or None."""
    work = [list(r) for r in rows]
    pivots = _row_reduce(work, d) if work else []
    free = next((j for j in range(d) if j not in pivots), None)
    if free is None:
        return None
    y = [Fraction(0)] * d
    y[free] = Fraction(1)
    for i, p in enumerate(pivots):
        y[p] = -work[i][free]
    return tuple(y)


def cofactor_normal(rows: Sequence[Sequence[Fraction]], d: int) -> RatVector:
    """Vector orthogonal to ``d - 1`` rows in dimension ``d`` (generalized cross product).

    Nonzero exactly when the rows are linearly independent.
    """
    if d == 1:
        return (Fraction(1),)
    out = []
    for j in range(d):
        minor = [[r[k] for k in range(d) if k != j] for r in rows]
        out.append((-1) ** j * det(minor))
    return tuple(out)


def gram_det(M) -> Fraction:
    """``det(M M^T)`` for a full-row-rank matrix."""
    M = _as_matrix(M)
    if rank(M) < M.nrows:
        raise RankError(f"matrix of shape {M.shape} does not have full row rank")
    return det(M @ M.T)


def maximal_minors(M) -> list[Fraction]:
    M = _as_matrix(M)
    s, n = M.shape
    return [det(M.select_columns(idx)) for idx in combinations(range(n), s)]


def maximal_minor_gcd(M) -> int:
    """gcd of all ``s x s`` minors of an integer ``s x n`` matrix of rank ``s``.

    Equals the index of the lattice spanned by the columns inside ``Z^s``.
    """
    M = _as_matrix(M)
    if not M.is_integral():
        raise DomainError("maximal_minor_gcd needs an integer matrix")
    g = 0
    for m in maximal_minors(M):
        g = math.gcd(g, int(m))
        if g == 1:
            return 1
    if g == 0:
        raise RankError(f"matrix of shape {M.shape} does not have full row rank")
    return g


@dataclass(frozen=True)
class RadicalValue:
    """Exact number ``coeff * sqrt(radicand)``.

    ``squarefree`` is False only when trial division gave up on a huge
    radicand; such values may not compare equal to their canonical twin.
    """

    coeff: Fraction
    radicand: int = 1
    squarefree: bool = True

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def is_rational(self) -> bool:
        return self.radicand == 1

    def scale(self, q) -> RadicalValue:
        return radical_normalize(self.coeff * as_rat(q), self.radicand)

    def square(self) -> Fraction:
        return self.coeff * self.coeff * self.radicand

    def __str__(self) -> str:
        if self.radicand == 1:
            return format_rat(self.coeff)
        return f"{format_rat(self.coeff)}*sqrt({self.radicand})"


def _split_square(n: int) -> tuple[int, int, bool]:
    """Write ``n = s**2 * f``; returns ``(s, f, f_known_squarefree)``."""
    square, free, rest = 1, 1, n
    p = 2
    while p * p <= rest and p <= TRIAL_DIVISION_BOUND:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        square *= p ** (e // 2)
        if e % 2:
            free *= p
        p += 1 if p == 2 else 2
    root = math.isqrt(rest)
    if root * root == rest:
        return square * root, free, True
    # rest is prime unless trial division stopped early
    return square, free * rest, p * p > rest


def radical_normalize(q, r) -> RadicalValue:
    """Canonical ``coeff * sqrt(radicand)`` equal to ``q * sqrt(r)``."""
    q, r = as_rat(q), as_rat(r)
    if r <= 0:
        raise DomainError(f"radicand must be positive, got {r}")
    if q == 0:
        return RadicalValue(Fraction(0), 1)
    # q*sqrt(a/b) = (q/b)*sqrt(a*b)
    a, b = r.numerator, r.denominator
    sq, free, ok = _split_square(a * b)
    return RadicalValue(q * sq / b, free, ok)
