"""Polytope representations and exact volume algorithms.

Three independent routes compute the volume of ``D(b) = {x : A x <= b}``:

* :func:`volume_via_T` stacks ``M = (A, I)`` and evaluates ``T(b|M)``;
* :func:`lasserre_volume` runs Lasserre's facet recursion in exact arithmetic;
* :func:`brion_volume` sums Brion's vertex-cone terms over a V-representation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    DegeneracyError,
    DimensionError,
    DomainError,
    InfeasibleError,
    SamplingExhaustedError,
    UnboundedError,
)
from .exact import (
    RadicalValue,
    RatMatrix,
    RatVector,
    as_rat,
    as_vector,
    cofactor_normal,
    det,
    dot,
    gram_det,
    inverse,
    kernel_vector,
    lcm_of_denominators,
    maximal_minor_gcd,
    radical_normalize,
    rank,
    solve,
)
from .tpower import DirectionMatrix, eval_T_explicit, eval_T_recurrence

Row = tuple[RatVector, Fraction]


@dataclass(frozen=True)
class HPolytope:
    """``{x in R^d : A x <= b}``, plus ``x >= 0`` when ``nonneg`` is set."""

    A: RatMatrix
    b: RatVector
    nonneg: bool = False

    def __post_init__(self):
        A = self.A if isinstance(self.A, RatMatrix) else RatMatrix.from_rows(self.A)
        b = as_vector(self.b)
        if len(b) != A.nrows:
            raise DimensionError(f"b has length {len(b)}, A has {A.nrows} rows")
        for i, row in enumerate(A.rows):
            if all(q == 0 for q in row):
                raise DomainError(f"row {i} of A is zero")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_lists(cls, A, b, nonneg: bool = False) -> HPolytope:
        return cls(RatMatrix.from_rows(A), as_vector(b), nonneg)

    @property
    def dim(self) -> int:
        return self.A.ncols

    def rows(self) -> list[Row]:
        """All constraints ``a . x <= b_i``, implicit sign constraints last."""
        out = list(zip(self.A.rows, self.b))
        if self.nonneg:
            d = self.dim
            for j in range(d):
                out.append((tuple(Fraction(-int(k == j)) for k in range(d)), Fraction(0)))
        return out

    def scaled(self, z) -> HPolytope:
        z = as_rat(z)
        return HPolytope(self.A, tuple(z * q for q in self.b), self.nonneg)

    def contains(self, x) -> bool:
        x = as_vector(x)
        return all(dot(a, x) <= bi for a, bi in self.rows())


@dataclass(frozen=True)
class VPolytope:
    """Vertices with ``d`` primitive integer edge generators each."""

    vertices: tuple[RatVector, ...]
    generators: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.generators):
            raise DimensionError("one generator set per vertex is required")
        for v, gens in zip(self.vertices, self.generators):
            d = len(v)
            if len(gens) != d or any(len(w) != d for w in gens):
                raise DegeneracyError(f"vertex {_fmt(v)} needs exactly {d} generators")
            for w in gens:
                if any(not isinstance(q, int) for q in w):
                    raise DomainError(f"generator {w} is not an integer vector")
                if math.gcd(*w) != 1:
                    raise DomainError(f"generator {w} is not primitive")
            if det([list(w) for w in gens]) == 0:
                raise DegeneracyError(f"generators at vertex {_fmt(v)} are dependent")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])


@dataclass
class VolumeReport:
    method: str
    value: Fraction | RadicalValue
    diagnostics: list[str] = field(default_factory=list)


def _fmt(v: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(q) for q in v) + ")"


def primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    k = lcm_of_denominators(v)
    ints = [int(q * k) for q in v]
    g = math.gcd(*ints)
    return tuple(i // g for i in ints)


def recession_direction(A_rows: Sequence[RatVector], d: int) -> RatVector | None:
    """A nonzero ``y`` with ``A y <= 0``, or None if the recession cone is trivial.

    If ``A`` has full column rank the cone is pointed and, when nontrivial,
    has an extreme ray cut out by ``d - 1`` independent rows.
    """
    if not A_rows or rank(A_rows) < d:
        if not A_rows:
            return tuple(Fraction(int(j == 0)) for j in range(d))
        # any kernel vector is a two-sided recession direction
        return kernel_vector(A_rows, d)
    for subset in combinations(A_rows, d - 1):
        r = cofactor_normal(subset, d)
        if all(q == 0 for q in r):
            continue
        for cand in (r, tuple(-q for q in r)):
            if all(dot(a, cand) <= 0 for a in A_rows):
                return cand
    return None


def _vertex_candidates(H: HPolytope) -> list[tuple[RatVector, list[int]]]:
    rows = H.rows()
    d = H.dim
    found: dict[RatVector, list[int]] = {}
    for idx in combinations(range(len(rows)), d):
        W = [rows[i][0] for i in idx]
        if det(W) == 0:
            continue
        v = solve(W, [rows[i][1] for i in idx])
        if v in found:
            continue
        if all(dot(a, v) <= bi for a, bi in rows):
            found[v] = [i for i, (a, bi) in enumerate(rows) if dot(a, v) == bi]
    return list(found.items())


def vertex_points(H: HPolytope) -> list[RatVector]:
    """Vertices of a bounded H-polytope, without a simplicity requirement."""
    if recession_direction([a for a, _ in H.rows()], H.dim) is not None:
        raise UnboundedError("constraint system admits a recession direction")
    pts = [v for v, _ in _vertex_candidates(H)]
    if not pts:
        raise InfeasibleError("polytope is empty")
    return pts


def enumerate_vertices(H: HPolytope) -> VPolytope:
    """Vertex enumeration for a bounded simple H-polytope.

    Every ``d``-subset of constraints is solved and filtered by feasibility.
    Generators at a vertex are the columns of ``-W^{-1}`` for the tight-row
    matrix ``W``, scaled to primitive integer vectors.
    """
    d = H.dim
    rows = H.rows()
    if recession_direction([a for a, _ in rows], d) is not None:
        raise UnboundedError("constraint system admits a recession direction")
    cands = _vertex_candidates(H)
    if not cands:
        raise InfeasibleError("polytope is empty")
    vertices, generators = [], []
    for v, tight in sorted(cands):
        if len(tight) != d:
            raise DegeneracyError(f"vertex {_fmt(v)} is not simple ({len(tight)} tight constraints)")
        W_inv = inverse([rows[i][0] for i in tight])
        gens = tuple(primitive_integer([-q for q in col]) for col in W_inv.columns())
        vertices.append(v)
        generators.append(gens)
    return VPolytope(tuple(vertices), tuple(generators))


def _sample_brion_c(V: VPolytope, seed: int) -> RatVector:
    rng = random.Random(seed)
    d = V.dim
    gens = [w for ws in V.generators for w in ws]
    for attempt in range(1, 2001):
        c = tuple(Fraction(rng.randint(-8 * attempt, 8 * attempt)) for _ in range(d))
        if all(dot(c, w) != 0 for w in gens):
            return c
    raise SamplingExhaustedError("no admissible direction for Brion's formula")  # pragma: no cover


def brion_volume(V: VPolytope, seed: int = 0, c=None) -> Fraction:
    """Volume of a simple rational polytope from its vertex cones.

    ``((-1)^d / d!) sum_v (v.c)^d |det W_v| / prod_k (w_k(v).c)``.
    """
    d = V.dim
    if c is None:
        c = _sample_brion_c(V, seed)
    c = as_vector(c)
    total = Fraction(0)
    for v, gens in zip(V.vertices, V.generators):
        denom = Fraction(1)
        for w in gens:
            wc = dot(w, c)
            if wc == 0:
                raise DomainError(f"c is orthogonal to generator {w}")
            denom *= wc
        total += dot(v, c) ** d * abs(det([list(w) for w in gens])) / denom
    return (-1) ** d * total / math.factorial(d)


# --- Lasserre --------------------------------------------------------------


def _normalize_rows(rows: Sequence[Row], notes: list[str]) -> list[Row] | None:
    """Drop trivial rows and merge parallel duplicates; None means infeasible."""
    best: dict[RatVector, Fraction] = {}
    for a, b in rows:
        lead = next((q for q in a if q != 0), None)
        if lead is None:
            if b < 0:
                return None
            continue
        scale = abs(lead)
        key = tuple(q / scale for q in a)
        val = b / scale
        if key not in best or val < best[key]:
            best[key] = val
    for key, val in best.items():
        neg = tuple(-q for q in key)
        if neg in best:
            gap = val + best[neg]
            if gap < 0:
                return None
            if gap == 0:
                notes.append("polytope is lower-dimensional (opposite facets coincide)")
                return None
    return list(best.items())


def _pivot_index(a: RatVector, pivot: str) -> int:
    nz = [j for j, q in enumerate(a) if q != 0]
    return nz[0] if pivot == "first" else nz[-1]


def _lasserre(rows: Sequence[Row], d: int, pivot: str, notes: list[str]) -> Fraction:
    rows = _normalize_rows(rows, notes)
    if rows is None:
        return Fraction(0)
    if d == 1:
        hi = min((b / a[0] for a, b in rows if a[0] > 0), default=None)
        lo = max((b / a[0] for a, b in rows if a[0] < 0), default=None)
        if hi is None or lo is None:
            raise UnboundedError("one-dimensional face is unbounded")
        return max(hi - lo, Fraction(0))
    if not rows:
        raise UnboundedError(f"{d}-dimensional face has no constraints")
    total = Fraction(0)
    for i, (a, b) in enumerate(rows):
        j = _pivot_index(a, pivot)
        face = []
        for t, (a2, b2) in enumerate(rows):
            if t == i:
                continue
            f = a2[j] / a[j]
            face.append((tuple(a2[k] - f * a[k] for k in range(d) if k != j), b2 - f * b))
        vol = _lasserre(face, d - 1, pivot, notes)
        total += b / abs(a[j]) * vol
    return total / d


def lasserre_volume(H: HPolytope, *, pivot: str = "first", notes: list[str] | None = None) -> Fraction:
    """Exact volume by Lasserre's facet recursion.

    Each facet ``a_i . x = b_i`` is eliminated by solving for the pivot
    coordinate ``x_j``; the projected facet volume carries the factor
    ``|a_ij| / ||a_i||`` relative to the true facet volume, so the norm
    cancels and the recursion stays rational:
    ``V_d = (1/d) sum_i (b_i / |a_ij|) V_proj,i``.
    ``pivot`` selects the first or last nonzero entry of each row.
    """
    if pivot not in ("first", "last"):
        raise ValueError(f"unknown pivot rule {pivot!r}")
    notes = [] if notes is None else notes
    rows = H.rows()
    if recession_direction([a for a, _ in rows], H.dim) is not None:
        raise UnboundedError("constraint system admits a recession direction")
    inner: list[str] = []
    vol = _lasserre(rows, H.dim, pivot, inner)
    if inner:
        notes.append(f"{len(inner)} degenerate faces contributed 0")
    if vol == 0:
        notes.append("volume is zero: polytope empty or lower-dimensional")
    return vol


# --- truncated-power route -------------------------------------------------


def stacked_system(H: HPolytope) -> tuple[RatMatrix, RatVector]:
    """``M = (A, I)`` with each row of ``(A | b)`` scaled so ``A`` is integral."""
    if not H.nonneg:
        raise DomainError("the truncated-power route needs the nonneg flag (x >= 0)")
    s = H.A.nrows
    rows, rhs = [], []
    for i, (a, b) in enumerate(zip(H.A.rows, H.b)):
        k = lcm_of_denominators(a)
        rows.append(tuple(q * k for q in a) + tuple(Fraction(int(t == i)) for t in range(s)))
        rhs.append(b * k)
    return RatMatrix(tuple(rows)), tuple(rhs)


def stacked_direction_matrix(H: HPolytope) -> tuple[DirectionMatrix, RatVector]:
    M, b = stacked_system(H)
    if recession_direction([a for a, _ in H.rows()], H.dim) is not None:
        raise UnboundedError("constraint system admits a recession direction")
    return DirectionMatrix(M), b


def volume_via_T(
    H: HPolytope,
    *,
    method: str = "explicit",
    c=None,
    seed: int = 0,
    notes: list[str] | None = None,
) -> Fraction:
    """Volume of ``{x >= 0 : A x <= b}`` as ``T(b | (A, I))``."""
    M, b = stacked_direction_matrix(H)
    if method == "explicit":
        return eval_T_explicit(M, b, c, notes=notes)
    if method == "recurrence":
        return eval_T_recurrence(M, b, seed=seed, notes=notes)
    raise ValueError(f"unknown method {method!r}")


def relative_volume(M: DirectionMatrix, x) -> Fraction:
    """Lattice-normalized volume of ``{y >= 0 : M y = x}`` for integer ``M``."""
    if not M.M.is_integral():
        raise DomainError("relative volume needs an integer matrix")
    return eval_T_explicit(M, x) * maximal_minor_gcd(M.M)


def euclidean_fiber_volume(M: DirectionMatrix, x, *, notes: list[str] | None = None) -> RadicalValue:
    """``sqrt(det M M^T) * T(x|M)``, the Euclidean volume of the fiber."""
    return radical_normalize(eval_T_explicit(M, x, notes=notes), gram_det(M.M))


METHODS = ("explicit", "recurrence", "lasserre", "brion")


def compute_volume(H: HPolytope, method: str, *, seed: int = 0, c=None) -> VolumeReport:
    notes: list[str] = []
    if method in ("explicit", "recurrence"):
        value = volume_via_T(H, method=method, c=c if method == "explicit" else None, seed=seed, notes=notes)
    elif method == "lasserre":
        value = lasserre_volume(H, notes=notes)
    elif method == "brion":
        value = brion_volume(enumerate_vertices(H), seed=seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    return VolumeReport(method, value, notes)
