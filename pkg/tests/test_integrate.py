import math
import random
from fractions import Fraction
from itertools import product

import pytest
import sympy
from scipy import integrate

from conftest import example1, random_simple_polytopes
from polyspline.errors import DimensionError, DomainError, SizeError
from polyspline.exact import RadicalValue
from polyspline.integrate import (
    Polynomial,
    integrate_monomial_fiber,
    integrate_monomial_hrep,
    integrate_polynomial_hrep,
    lift_exponents,
)
from polyspline.oracle import mc_integrate, simplex_exact
from polyspline.polytope import HPolytope, lasserre_volume, vertex_points
from polyspline.tpower import DirectionMatrix, eval_T_explicit, sample_generic_c

F = Fraction


def simplex(d):
    return HPolytope.from_lists([[1] * d], [1], nonneg=True)


def polygon_integral(H, k):
    """Exact fan triangulation of a 2D polytope, integrated symbolically."""
    pts = vertex_points(H)
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    pts.sort(key=lambda p: math.atan2(float(p[1] - cy), float(p[0] - cx)))
    s, t = sympy.symbols("s t")
    total = sympy.Integer(0)
    v0 = [sympy.Rational(q.numerator, q.denominator) for q in pts[0]]
    for a, b in zip(pts[1:], pts[2:]):
        v1 = [sympy.Rational(q.numerator, q.denominator) for q in a]
        v2 = [sympy.Rational(q.numerator, q.denominator) for q in b]
        x = v0[0] + s * (v1[0] - v0[0]) + t * (v2[0] - v0[0])
        y = v0[1] + s * (v1[1] - v0[1]) + t * (v2[1] - v0[1])
        jac = abs((v1[0] - v0[0]) * (v2[1] - v0[1]) - (v1[1] - v0[1]) * (v2[0] - v0[0]))
        total += jac * sympy.integrate(x ** k[0] * y ** k[1], (t, 0, 1 - s), (s, 0, 1))
    return Fraction(str(total))


def test_lift_exponents():
    M = DirectionMatrix.from_rows([[1, 0], [0, 1]])
    L = lift_exponents(M, [1, 2])
    assert tuple(L.M.columns()) == ((1, 0), (1, 0), (0, 1), (0, 1), (0, 1))
    with pytest.raises(DimensionError):
        lift_exponents(M, [1])
    with pytest.raises(DomainError):
        lift_exponents(M, [1, -1])


def test_fiber_integral_on_segment():
    # u1 over {u >= 0 : u1 + u2 = 1}: arc length element sqrt(2) dt
    M = DirectionMatrix.from_rows([[1, 1]])
    value = integrate_monomial_fiber(M, [1], [1, 0])
    direct = integrate.quad(lambda t: t * math.sqrt(2), 0, 1)[0]
    assert value == RadicalValue(F(1, 2), 2)
    assert math.isclose(float(value), direct, rel_tol=1e-12)


def test_hrep_examples():
    square = HPolytope.from_lists([[1, 0], [0, 1]], [1, 1], nonneg=True)
    assert integrate_monomial_hrep(square, [1, 0]) == F(1, 2)
    assert integrate_monomial_hrep(square, [0, 0]) == 1
    assert integrate_monomial_hrep(simplex(2), [1, 1]) == F(1, 24)
    p = Polynomial.from_terms([(6, [1, 1])])
    assert integrate_polynomial_hrep(simplex(2), p) == F(1, 4)
    assert integrate_polynomial_hrep(simplex(2), Polynomial.from_terms([(1, [1, 0]), (1, [0, 1])])) == F(1, 3)


def test_zero_exponent_is_volume():
    for H in random_simple_polytopes(10, seed=17):
        assert integrate_monomial_hrep(H, [0] * H.dim) == lasserre_volume(H)


def test_slack_exponents():
    # slack of x1 + x2 <= 1 over the triangle: int (1 - x - y) = 1/6
    assert integrate_monomial_hrep(simplex(2), [0, 0, 1]) == F(1, 6)
    half = HPolytope.from_lists([["1/2", "1/2"]], ["1/2"], nonneg=True)
    assert integrate_monomial_hrep(half, [0, 0, 1]) == F(1, 12)


def test_simplex_moments_exhaustive():
    for d in range(1, 4):
        for k in product(range(4), repeat=d):
            if sum(k) <= 3:
                assert integrate_monomial_hrep(simplex(d), k) == simplex_exact(k, d)


def test_matches_symbolic_triangulation():
    rng = random.Random(4)
    for H in random_simple_polytopes(12, seed=31, dims=(2,)):
        k = (rng.randint(0, 3), rng.randint(0, 3))
        assert integrate_monomial_hrep(H, k) == polygon_integral(H, k)


def test_linearity():
    H = example1()
    p = Polynomial.from_terms([(3, [2, 0]), (F(-1, 2), [0, 1])])
    q = Polynomial.from_terms([(1, [1, 1]), (2, [0, 1])])
    both = Polynomial.from_terms(list(p.terms) + list(q.terms))
    assert integrate_polynomial_hrep(H, both) == integrate_polynomial_hrep(H, p) + integrate_polynomial_hrep(H, q)


def test_monte_carlo_agreement():
    H = example1(2)
    p = Polynomial.from_terms([(1, [2, 1]), (F(1, 3), [0, 3])])
    est = mc_integrate(H, p, samples=300_000, seed=3)
    assert est.agrees(integrate_polynomial_hrep(H, p), sigmas=4)


def test_repeated_columns_are_c_invariant():
    M = DirectionMatrix.from_rows([[1, 0, 1], [0, 1, 1]])
    L = lift_exponents(M, [2, 1, 1])
    x = [F(5, 2), F(3, 2)]
    values = {eval_T_explicit(L, x, sample_generic_c(L, seed=k)) for k in range(4)}
    assert len(values) == 1


def test_size_cap():
    with pytest.raises(SizeError):
        integrate_monomial_hrep(example1(), [20, 5])
    with pytest.raises(DimensionError):
        integrate_polynomial_hrep(example1(), Polynomial.from_terms([(1, [1, 1, 1])]))
