"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines at the end of the run."""

import random
from collections import deque
from fractions import Fraction
from itertools import combinations, product

from conftest import example1, random_simple_polytopes
from polyspline.exact import RadicalValue, RatMatrix, det, maximal_minor_gcd
from polyspline.integrate import integrate_monomial_hrep
from polyspline.oracle import mc_volume, simplex_exact
from polyspline.polytope import HPolytope, brion_volume, enumerate_vertices, lasserre_volume, stacked_system, volume_via_T
from polyspline.slices import SliceSpec, box_moment_check, box_spline, good_check, slice_volume
from polyspline.tpower import DirectionMatrix, ExpSum, eval_E, eval_T_explicit, eval_T_recurrence

F = Fraction


def test_criterion_1_example_volume_by_four_methods():
    for z in (1, 2, 3):
        H = example1(z)
        expected = F(17, 48) * z * z
        assert volume_via_T(H, method="explicit", c=[1, 1, 1, 1, F(1, 2)]) == expected
        assert volume_via_T(H, method="recurrence") == expected
        assert lasserre_volume(H) == expected
        assert brion_volume(enumerate_vertices(H)) == expected
        est = mc_volume(H, samples=1_000_000, seed=z)
        assert est.agrees(expected, sigmas=3), (z, est)


def test_criterion_2_simplex_moments():
    for d in range(1, 5):
        omega = HPolytope.from_lists([[1] * d], [1], nonneg=True)
        for k in product(range(5), repeat=d):
            if sum(k) <= 4:
                assert integrate_monomial_hrep(omega, k) == simplex_exact(k, d), (d, k)


def test_criterion_3_sign_convention():
    pair = DirectionMatrix.from_rows([[1, 1]])
    triple = DirectionMatrix.from_rows([[1, 1, 1]])
    for x in (1, 2, 5):
        assert eval_T_explicit(pair, [x]) == x
        assert eval_T_explicit(triple, [x]) == F(x * x, 2)
        assert eval_T_recurrence(triple, [x]) == F(x * x, 2)
        assert eval_E(pair, [x], [1, 2]) == ExpSum(((F(1), F(x)), (F(-1), F(2 * x))))


def test_criterion_4_cross_method_agreement():
    polytopes = random_simple_polytopes(120, seed=2024, max_facets=6, dims=(1, 2, 3))
    assert len(polytopes) >= 100
    assert {H.dim for H in polytopes} == {1, 2, 3}
    for H in polytopes:
        assert H.A.nrows + H.dim <= 6
        values = {
            volume_via_T(H, method="explicit"),
            volume_via_T(H, method="recurrence"),
            lasserre_volume(H),
            brion_volume(enumerate_vertices(H)),
        }
        assert len(values) == 1, (H, values)


def test_criterion_5_good_bound():
    rng = random.Random(55)
    for _ in range(200):
        m = rng.randint(1, 8)
        a = [F(rng.randint(1, 30), rng.randint(1, 10)) for _ in range(m)]
        rep = good_check(a)
        assert rep.bound_ratio == rep.center_value**2 * sum(q * q for q in a)
        assert rep.holds, a
        assert rep.equality == (m == 1), a
    assert box_spline([[1, 1]], [1]) == 1
    assert box_spline([[1, 1, 1]], [F(3, 2)]) == F(3, 4)


def test_criterion_6_slice_geometry():
    assert slice_volume(SliceSpec([[1, 1]], [1])) == RadicalValue(F(1), 2)
    hexagon = slice_volume(SliceSpec([[1, 1, 1]], [F(3, 2)]))
    assert hexagon == RadicalValue(F(3, 4), 3)
    assert abs(float(hexagon) - 1.299038105676658) < 1e-12
    for rows, x in (([[1, 0]], [F(1, 2)]), ([[0, 1, 0]], [F(1, 3)]), ([[1, 0, 0], [0, 0, 1]], [F(1, 2), F(1, 4)])):
        assert slice_volume(SliceSpec(rows, x)) == RadicalValue(F(1), 1)


def test_criterion_7_moment_identities():
    for a in ([1], [1, 1], [1, 2], [1, 2, 3]):
        rep = box_moment_check(a, grid=10_000)
        assert rep.max_deviation < 1e-6, (a, rep.deviations)


def lattice_index_by_counting(cols, s):
    """``|Z^s / L|`` for ``L`` spanned by the columns, counted modulo ``D = |det Y|``."""
    D = next(abs(det(RatMatrix.from_columns(Y))) for Y in combinations(cols, s) if det(RatMatrix.from_columns(Y)) != 0)
    D = int(D)
    start = (0,) * s
    seen = {start}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for c in cols:
            q = tuple((a + int(b)) % D for a, b in zip(p, c))
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return D**s // len(seen)


def test_criterion_8_lattice_index():
    rng = random.Random(88)
    checked = 0
    while checked < 50:
        s = rng.choice((1, 2))
        n = rng.randint(s, 4)
        cols = [tuple(rng.randint(-5, 5) for _ in range(s)) for _ in range(n)]
        if all(det(RatMatrix.from_columns(Y)) == 0 for Y in combinations(cols, s)):
            continue
        assert maximal_minor_gcd(RatMatrix.from_columns(cols)) == lattice_index_by_counting(cols, s), cols
        checked += 1
    for _ in range(50):
        d, s = rng.randint(1, 3), rng.randint(1, 3)
        A = [[rng.randint(-9, 9) or 1 for _ in range(d)] for _ in range(s)]
        M, _ = stacked_system(HPolytope.from_lists(A, [1] * s, nonneg=True))
        assert maximal_minor_gcd(M) == 1
