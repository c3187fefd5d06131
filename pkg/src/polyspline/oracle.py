"""Independent ground truth: Monte Carlo estimators and the simplex moment formula."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .integrate import Polynomial, k_factorial
from .polytope import HPolytope, vertex_points

BATCH = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def agrees(self, exact, sigmas: float = 3.0) -> bool:
        return abs(self.mean - float(exact)) <= sigmas * self.std_error + 1e-12


def _batches(samples: int, seed: int):
    """Deterministic per-batch Philox streams; the merge is order independent."""
    children = np.random.SeedSequence(seed).spawn((samples + BATCH - 1) // BATCH)
    for i, child in enumerate(children):
        size = min(BATCH, samples - i * BATCH)
        yield size, np.random.Generator(np.random.Philox(child))


def _bounding_box(H: HPolytope) -> tuple[np.ndarray, np.ndarray]:
    pts = np.array([[float(q) for q in v] for v in vertex_points(H)])
    return pts.min(axis=0), pts.max(axis=0)


def _estimate(H: HPolytope, integrand, samples: int, seed: int) -> McEstimate:
    lo, hi = _bounding_box(H)
    box = float(np.prod(hi - lo))
    A = np.array([[float(q) for q in a] for a, _ in H.rows()])
    b = np.array([float(q) for _, q in H.rows()])
    total = total_sq = 0.0
    for size, gen in _batches(samples, seed):
        x = lo + (hi - lo) * gen.random((size, H.dim))
        inside = np.all(x @ A.T <= b + 1e-12, axis=1)
        vals = np.where(inside, integrand(x), 0.0)
        total += vals.sum()
        total_sq += (vals * vals).sum()
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return McEstimate(float(box * mean), float(box * math.sqrt(var / samples)), samples, seed)


def mc_volume(H: HPolytope, samples: int = 100_000, seed: int = 0) -> McEstimate:
    """Rejection sampling in the vertex bounding box; binomial standard error."""
    return _estimate(H, lambda x: np.ones(len(x)), samples, seed)


def mc_integrate(H: HPolytope, p: Polynomial, samples: int = 100_000, seed: int = 0) -> McEstimate:
    terms = [(float(c), np.array(e)) for c, e in p.terms]

    def f(x):
        out = np.zeros(len(x))
        for c, e in terms:
            out += c * np.prod(x**e, axis=1)
        return out

    return _estimate(H, f, samples, seed)


def simplex_exact(k: Sequence[int], d: int) -> Fraction:
    """``int over {y >= 0, sum y <= 1}`` of ``y^k`` equals ``k! / (|k| + d)!``."""
    if len(k) != d:
        raise ValueError(f"exponent vector has length {len(k)}, expected {d}")
    return Fraction(k_factorial(k), math.factorial(sum(k) + d))
