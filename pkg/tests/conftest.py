from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from polyspline.errors import PolysplineError
from polyspline.polytope import HPolytope, enumerate_vertices

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

EXAMPLE1_A = [[1, 1], [-2, 2], [2, -1]]


def example1(z=1) -> HPolytope:
    return HPolytope.from_lists(EXAMPLE1_A, [z, z, z], nonneg=True)


def random_simple_polytopes(count: int, seed: int, max_facets: int = 6, dims=(1, 2, 3)):
    """Bounded simple integer polytopes ``{x >= 0 : A x <= b}`` with at most ``max_facets`` facets."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.choice(dims)
        s = rng.randint(1, max_facets - d)
        A = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(s)]
        if any(all(v == 0 for v in row) for row in A):
            continue
        b = [rng.randint(1, 6) for _ in range(s)]
        H = HPolytope.from_lists(A, b, nonneg=True)
        try:
            enumerate_vertices(H)
        except PolysplineError:
            continue
        out.append(H)
    return out


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and "criterion" in report.nodeid:
        if report.when == "call" or report.outcome == "failed":
            name = report.nodeid.split("::")[-1]
            if _acceptance.get(name) != "FAIL":
                _acceptance[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")


def qhull_volume(H: HPolytope) -> float:
    """Volume from scipy's halfspace intersection, seeded with a Chebyshev center."""
    import numpy as np
    from scipy.optimize import linprog
    from scipy.spatial import ConvexHull, HalfspaceIntersection

    A = np.array([[float(q) for q in a] for a, _ in H.rows()])
    b = np.array([float(q) for _, q in H.rows()])
    norms = np.linalg.norm(A, axis=1)
    res = linprog(
        np.r_[np.zeros(H.dim), -1.0],
        A_ub=np.c_[A, norms],
        b_ub=b,
        bounds=[(None, None)] * H.dim + [(0, None)],
    )
    if res.x[-1] < 1e-9:
        return 0.0
    if H.dim == 1:
        return float(res.x[-1] * 2)
    hs = HalfspaceIntersection(np.c_[A, -b], res.x[:-1])
    return float(ConvexHull(hs.intersections).volume)
