import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from polyspline.errors import CertificateError, DimensionError, DomainError, RankError
from polyspline.exact import RatMatrix
from polyspline.tpower import (
    DirectionMatrix,
    ExpSum,
    PointClassification,
    certify_generic,
    classify_point,
    eval_E,
    eval_T_explicit,
    eval_T_recurrence,
    sample_generic_c,
)

F = Fraction
FIG = [[1, 1, 1, 0, 0], [-2, 2, 0, 1, 0], [2, -1, 0, 0, 1]]


def dm(rows):
    return DirectionMatrix.from_rows(rows)


def random_direction_matrix(rng, s, n):
    while True:
        cols = [[rng.randint(-2, 3) for _ in range(s)] for _ in range(n)]
        try:
            return DirectionMatrix(RatMatrix.from_columns(cols))
        except (DomainError, RankError):
            continue


def random_cone_point(rng, M):
    lam = [F(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(M.n)]
    return M.M @ lam


def test_direction_matrix_validation():
    with pytest.raises(DomainError):
        dm([[1, -1]])
    with pytest.raises(DomainError):
        dm([[1, 0], [0, 0]])
    with pytest.raises(RankError):
        dm([[1, 2], [1, 2]])
    with pytest.raises(DomainError):
        DirectionMatrix.from_rows([[1, 1]], witness=[-1])


def test_certify_generic_examples():
    certify_generic(dm([[1, 0], [0, 1]]), [1, 1])
    with pytest.raises(CertificateError):
        certify_generic(dm([[1, 1]]), [1, 1])
    certify_generic(dm([[1, 1]]), [1, 2])
    with pytest.raises(DimensionError):
        certify_generic(dm([[1, 1]]), [1])


def test_sampled_c_is_deterministic_and_certified():
    M = dm(FIG)
    a, b = sample_generic_c(M, seed=7), sample_generic_c(M, seed=7)
    assert a.c == b.c
    certify_generic(M, a.c)
    M = dm([[1, 1, 1, 1]])
    assert len(set(sample_generic_c(M).c)) == 4


def test_classify_examples():
    M = dm([[1, 0], [0, 1]])
    assert classify_point(M, [1, 1]) is PointClassification.INTERIOR
    assert classify_point(M, [1, 0]) is PointClassification.BOUNDARY
    assert classify_point(M, [-1, 1]) is PointClassification.OUTSIDE
    M = dm([[1, 0, 1], [0, 1, 1]])
    assert classify_point(M, [1, 1]) is PointClassification.BOUNDARY
    assert classify_point(M, [2, 1]) is PointClassification.INTERIOR


def test_figure_example_value():
    M = dm(FIG)
    assert eval_T_explicit(M, [1, 1, 1], [1, 1, 1, 1, F(1, 2)]) == F(17, 48)
    assert eval_T_recurrence(M, [1, 1, 1]) == F(17, 48)


@pytest.mark.parametrize("x", [1, 2, 5])
def test_low_dimensional_signs(x):
    assert eval_T_explicit(dm([[1, 1]]), [x]) == x
    assert eval_T_explicit(dm([[1, 1, 1]]), [x]) == F(x * x, 2)
    assert eval_T_recurrence(dm([[1, 1, 1]]), [x]) == F(x * x, 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=5), st.fractions(min_value=0, max_value=10, max_denominator=7))
def test_one_row_matches_simplex_fiber(a, x):
    # the fiber {u >= 0 : a.u = x} is a simplex; T = x^(n-1) / ((n-1)! prod a)
    M = dm([a])
    n = len(a)
    expected = x ** (n - 1) / (math.factorial(n - 1) * math.prod(a))
    assert eval_T_explicit(M, [x]) == expected
    assert eval_T_recurrence(M, [x]) == expected


def test_c_invariance_at_interior_points():
    rng = random.Random(11)
    M = dm(FIG)
    cs = [sample_generic_c(M, seed=k) for k in range(3)] + [[1, 1, 1, 1, F(1, 2)]]
    checked = 0
    while checked < 50:
        x = random_cone_point(rng, M)
        if classify_point(M, x) is not PointClassification.INTERIOR:
            continue
        values = {eval_T_explicit(M, x, c) for c in cs}
        assert len(values) == 1
        checked += 1


def test_explicit_matches_recurrence_random():
    rng = random.Random(3)
    for _ in range(60):
        s = rng.randint(1, 3)
        n = rng.randint(s, 7)
        M = random_direction_matrix(rng, s, n)
        for _ in range(3):
            x = random_cone_point(rng, M)
            assert eval_T_explicit(M, x) == eval_T_recurrence(M, x, seed=rng.randint(0, 99))


def test_homogeneity_and_support():
    rng = random.Random(5)
    for _ in range(30):
        s = rng.randint(1, 3)
        n = rng.randint(s, 6)
        M = random_direction_matrix(rng, s, n)
        x = random_cone_point(rng, M)
        t = F(rng.randint(1, 9), rng.randint(1, 4))
        assert eval_T_explicit(M, [t * v for v in x]) == t ** (n - s) * eval_T_explicit(M, x)
        assert eval_T_explicit(M, [-v for v in M.witness]) == 0


def test_wall_point_uses_one_sided_limit():
    # fiber over (1,1) is the segment (1-t, 1-t, t), t in [0,1]: length sqrt(3), gram det 3
    M = dm([[1, 0, 1], [0, 1, 1]])
    notes = []
    assert eval_T_explicit(M, [1, 1], [1, 2, 5], notes=notes) == 1
    assert notes and "wall" in notes[0]
    assert eval_T_recurrence(M, [1, 1]) == 1
    for t in [F(1, 3), 2, 7]:
        assert eval_T_explicit(M, [t, t]) == t


def test_wall_points_agree_between_methods():
    rng = random.Random(8)
    for _ in range(30):
        M = random_direction_matrix(rng, 2, rng.randint(3, 6))
        j = rng.randrange(M.n)
        x = [F(rng.randint(1, 5)) * v for v in M.M.column(j)]
        assert eval_T_explicit(M, x) == eval_T_recurrence(M, x)


def test_distributional_identity():
    # int_{u >= 0} phi(M u) du = int phi(x) T(x|M) dx with phi(x) = exp(-x1 - 2 x2)
    M = dm([[1, 0, 1], [0, 1, 1]])

    def integrand(y, x):
        return math.exp(-x - 2 * y) * float(eval_T_explicit(M, [F(x), F(y)]))

    lhs = 1 * F(1, 2) * F(1, 3)
    inner = integrate.dblquad(integrand, 0, 30, 0, lambda x: x, epsabs=1e-10)[0]
    outer = integrate.dblquad(integrand, 0, 30, lambda x: x, 30, epsabs=1e-10)[0]
    assert abs(inner + outer - float(lhs)) < 1e-6


def test_exponential_example():
    E = eval_E(dm([[1, 1]]), [3], [1, 2])
    assert E == ExpSum(((F(1), F(3)), (F(-1), F(6))))
    direct = integrate.quad(lambda u: math.exp(-u - 2 * (3 - u)), 0, 3)[0]
    assert abs(float(E) - direct) < 1e-12


def test_exponential_gradient_matches_finite_difference():
    # along a column m_j: (D_{m_j} + c_j) E(x|M) = E(x|M minus m_j)
    M = dm([[1, 0, 1], [0, 1, 1]])
    c = [1, 2, 5]
    x = [F(5, 2), F(3, 2)]
    h = 1e-6
    for j in range(3):
        m = M.M.column(j)
        plus = eval_E(M, [a + F(h) * b for a, b in zip(x, m)], c).evaluate()
        minus = eval_E(M, [a - F(h) * b for a, b in zip(x, m)], c).evaluate()
        deriv = (plus - minus) / (2 * h)
        rest = [k for k in range(3) if k != j]
        sub = DirectionMatrix(M.M.select_columns(rest), M.witness)
        lhs = deriv + c[j] * eval_E(M, x, c).evaluate()
        rhs = eval_E(sub, x, [c[k] for k in rest]).evaluate()
        assert abs(lhs - rhs) < 1e-6


def test_exponential_limit_recovers_truncated_power():
    M = dm(FIG)
    x = [1, 1, 1]
    base = sample_generic_c(M).c
    eps = F(1, 10**12)
    E = eval_E(M, x, [eps * q for q in base])
    with mpmath.workdps(80):
        value = sum(
            mpmath.mpf(c.numerator) / c.denominator * mpmath.exp(-mpmath.mpf(e.numerator) / e.denominator)
            for c, e in E.terms
        )
        assert abs(float(value) - 17 / 48) < 1e-8
