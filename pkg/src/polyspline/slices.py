"""Box splines and volumes of hyperplane sections of the unit cube.

``B(x|M) = sum_{eps in {0,1}^n} (-1)^|eps| T(x - M eps | M)`` and
``vol(P cap [0,1)^n) = sqrt(det M M^T) * B(x|M)`` for ``P = {y >= 0 : M y = x}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, DomainError, RankError, SizeError
from .exact import (
    RadicalValue,
    RatMatrix,
    RatVector,
    as_vector,
    dot,
    gram_det,
    radical_normalize,
    rank,
)
from .tpower import (
    DirectionMatrix,
    _as_generic,
    _basis_table,
    _explicit,
    sample_generic_c,
    tiebreak_direction,
)

MAX_BOX_COLUMNS = 20


def _shift_table(M: RatMatrix) -> dict[RatVector, int]:
    """``{M eps: signed count}`` over ``eps in {0,1}^n`` with cancellations merged."""
    shifts: dict[RatVector, int] = {tuple(Fraction(0) for _ in range(M.nrows)): 1}
    for col in M.columns():
        nxt = dict(shifts)
        for p, k in shifts.items():
            q = tuple(a + b for a, b in zip(p, col))
            nxt[q] = nxt.get(q, 0) - k
        shifts = {p: k for p, k in nxt.items() if k}
    return shifts


def eval_box_spline(M: DirectionMatrix, x, seed: int = 0, *, c=None, cap: int = MAX_BOX_COLUMNS) -> Fraction:
    """Box spline by the alternating sum of shifted truncated powers.

    All ``2^n`` terms share one generic ``c`` and one subset table.
    """
    if M.n > cap:
        raise SizeError(f"box spline with {M.n} columns exceeds the cap of {cap}")
    x = as_vector(x)
    if len(x) != M.s:
        raise DimensionError(f"point has length {len(x)}, expected {M.s}")
    gc = sample_generic_c(M, seed) if c is None else _as_generic(M.M, c)
    table = _basis_table(M.M, tiebreak_direction(M.M))
    total = Fraction(0)
    for p, k in _shift_table(M.M).items():
        y = tuple(a - b for a, b in zip(x, p))
        if dot(M.witness, y) < 0:
            continue
        total += k * _explicit(table, gc.c, y)
    return total


def _orient(M: RatMatrix, x: RatVector, seed: int) -> tuple[DirectionMatrix, RatVector]:
    """Drop zero columns and flip the rest into a pointed cone.

    Reflecting ``u_j -> 1 - u_j`` gives ``B(x|M) = B(x - m_j | M')`` with
    ``m_j`` replaced by ``-m_j``; zero columns integrate to a factor 1.
    """
    cols = [c for c in M.columns() if any(q != 0 for q in c)]
    if not cols:
        raise RankError("all directions are zero")
    rng = random.Random(seed)
    s = M.nrows
    w = tuple(sum((c[i] for c in cols), Fraction(0)) for i in range(s))
    for attempt in range(1, 1001):
        if all(dot(w, c) != 0 for c in cols):
            break
        w = tuple(Fraction(rng.randint(-8 * attempt, 8 * attempt)) for _ in range(s))
    else:  # pragma: no cover
        raise DomainError("no orientation vector found")
    oriented = []
    for c in cols:
        if dot(w, c) < 0:
            x = tuple(a - b for a, b in zip(x, c))
            c = tuple(-q for q in c)
        oriented.append(c)
    return DirectionMatrix(RatMatrix.from_columns(oriented), w), x


def box_spline(M, x, seed: int = 0, **kw) -> Fraction:
    """Box spline for any full-rank direction set (zero or mixed-sign columns allowed)."""
    mat = M.M if isinstance(M, DirectionMatrix) else (M if isinstance(M, RatMatrix) else RatMatrix.from_rows(M))
    x = as_vector(x)
    if len(x) != mat.nrows:
        raise DimensionError(f"point has length {len(x)}, expected {mat.nrows}")
    D, y = _orient(mat, x, seed)
    return eval_box_spline(D, y, seed, **kw)


@dataclass(frozen=True)
class SliceSpec:
    """Affine slice ``{y : M y = x}`` of ``[0,1)^n`` with ``M`` of full row rank."""

    M: RatMatrix
    x: RatVector

    def __post_init__(self):
        M = self.M if isinstance(self.M, RatMatrix) else RatMatrix.from_rows(self.M)
        x = as_vector(self.x)
        if len(x) != M.nrows:
            raise DimensionError(f"point has length {len(x)}, expected {M.nrows}")
        if rank(M) != M.nrows:
            raise RankError("slice matrix must have full row rank")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "x", x)


def slice_volume(spec: SliceSpec, seed: int = 0) -> RadicalValue:
    return radical_normalize(box_spline(spec.M, spec.x, seed), gram_det(spec.M))


def _positive_weights(a) -> RatVector:
    a = as_vector(a)
    if not a:
        raise DimensionError("weight vector is empty")
    if any(q <= 0 for q in a):
        raise DomainError("weights must be positive")
    return a


def central_section_volume(a, n: int | None = None, seed: int = 0) -> RadicalValue:
    """Volume of ``{y in [0,1)^n : a . y = sum(a)/2}``; coordinates past ``len(a)`` are free."""
    a = _positive_weights(a)
    if n is not None and n < len(a):
        raise DimensionError(f"dimension {n} is smaller than the number of weights {len(a)}")
    center = sum(a) / 2
    return radical_normalize(box_spline([a], (center,), seed), sum(q * q for q in a))


@dataclass(frozen=True)
class GoodReport:
    weights: RatVector
    center_value: Fraction
    holds: bool
    equality: bool

    @property
    def bound_ratio(self) -> Fraction:
        """``B(center)^2 * sum a_i^2``; at least 1 when the bound holds."""
        return self.center_value**2 * sum(q * q for q in self.weights)


def good_check(a, seed: int = 0) -> GoodReport:
    """Exact check of ``max B(.|a) >= 1/||a||`` at the center of symmetry."""
    a = _positive_weights(a)
    value = box_spline([a], (sum(a) / 2,), seed)
    ratio = value**2 * sum(q * q for q in a)
    return GoodReport(a, value, ratio >= 1, ratio == 1)


@dataclass(frozen=True)
class MomentReport:
    weights: RatVector
    cells: int
    mass: float
    half_mass: float
    second_moment: float
    targets: tuple[float, float, float]

    @property
    def deviations(self) -> tuple[float, float, float]:
        got = (self.mass, self.half_mass, self.second_moment)
        return tuple(abs(g - t) / abs(t) for g, t in zip(got, self.targets))

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


def centered_spline_samples(a, cells: int, seed: int = 0) -> list[tuple[Fraction, Fraction]]:
    """``(t, C(t))`` at cell midpoints of the support, ``C(t) = B(t + sum(a)/2 | a)``."""
    a = _positive_weights(a)
    width = sum(a)
    D, _ = _orient(RatMatrix.from_rows([a]), (Fraction(0),), seed)
    out = []
    for i in range(cells):
        y = width * (2 * i + 1) / (2 * cells)
        out.append((y - width / 2, eval_box_spline(D, (y,), seed)))
    return out


def box_moment_check(a, grid: int = 10_000, seed: int = 0) -> MomentReport:
    """Midpoint-rule moments of the centered box spline against their exact targets.

    Targets: total mass 1, mass on ``t > 0`` equal to 1/2, and
    ``int_0^inf t^2 C(t) dt = sum a_i^2 / 24``.
    """
    a = _positive_weights(a)
    if grid < 1000 or grid % 2:
        raise DomainError("grid must be an even cell count of at least 1000")
    h = float(sum(a)) / grid
    mass = half = second = 0.0
    for t, value in centered_spline_samples(a, grid, seed):
        v = float(value)
        mass += v
        if t > 0:
            half += v
            second += float(t) ** 2 * v
    targets = (1.0, 0.5, float(sum(q * q for q in a) / 24))
    return MomentReport(a, grid, mass * h, half * h, second * h, targets)
