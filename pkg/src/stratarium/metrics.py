"""Quality measures for point sets in a box.

Covering radius (the largest distance from any point of the domain to the
nearest sample point) is expensive to compute exactly, so this module
brackets it: a cheap upper bound from a stratification holding one point per
box, a Monte Carlo lower bound, and a sample-size-only general lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .geometry import TOL, Hyperbox, Stratification, as_pointset
from .rng import spawn

#: tiny negative squared discrepancies from cancellation are clamped to zero
NEG_CLAMP = 1e-12


@dataclass(frozen=True)
class CoveringRadiusBounds:
    upper: float
    mc_lower: float
    general_lower: float
    mc_samples: int


def discrepancy_t_sq(points) -> float:
    """Squared unanchored L2 discrepancy of a point set in the unit cube, in O(N^2 n)."""
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("points must be a non-empty (N, n) array")
    if np.any((x < 0) | (x > 1)):
        raise ValueError("discrepancy is defined for points in the unit hypercube")
    N, n = x.shape
    pair = np.ones((N, N))
    for k in range(n):
        col = x[:, k]
        pair *= (1.0 - np.maximum.outer(col, col)) * np.minimum.outer(col, col)
    first = pair.sum() / N**2
    second = 2.0 ** (1 - n) / N * np.prod(x * (1 - x), axis=1).sum()
    value = first - second + 12.0**-n
    if value < -NEG_CLAMP:
        raise ArithmeticError(f"negative squared discrepancy {value!r}")
    return max(float(value), 0.0)


def discrepancy_t(points) -> float:
    """Unanchored L2 discrepancy ``T_N`` (root of :func:`discrepancy_t_sq`)."""
    return float(np.sqrt(discrepancy_t_sq(points)))


def expected_discrepancy_sq(N: int, n: int) -> float:
    """Expected squared unanchored discrepancy of ``N`` i.i.d. uniform points."""
    if N < 1 or n < 1:
        raise ValueError("N and n must be positive")
    return 6.0**-n * (1 - 2.0**-n) / N


def covering_radius_upper(points, strat: Stratification) -> float:
    """Largest distance from a point to the furthest corner of its own stratum.

    Point ``i`` must lie in stratum ``i``; the strata need to cover the
    domain but may overlap.
    """
    x = np.asarray(points, dtype=float)
    if x.shape != strat.lower.shape:
        raise ValueError(f"{x.shape[0]} points for {len(strat)} strata")
    outside = np.any((x < strat.lower - TOL) | (x > strat.upper + TOL), axis=1)
    if np.any(outside):
        i = int(np.argmax(outside))
        raise ValueError(f"point {i} lies outside its stratum")
    far = np.maximum(x - strat.lower, strat.upper - x)
    return float(np.sqrt(np.max(np.sum(far**2, axis=1))))


def default_mc_samples(n: int) -> int:
    return 10**4 * 2 * int(n)


def covering_radius_mc_lower(points, M: int | None, rng: np.random.Generator, domain: Hyperbox | None = None,
                             test_points=None) -> float:
    """Monte Carlo lower bound: max over ``M`` uniform test points of the nearest-point distance.

    ``test_points`` replaces the random draw when given.
    """
    ps = as_pointset(points, domain)
    dom = domain or ps.domain
    if test_points is None:
        if M is None:
            M = default_mc_samples(ps.dim)
        if M < 1:
            raise ValueError("M must be at least 1")
        test_points = dom.lo + dom.extent * rng.random((int(M), ps.dim))
    dist, _ = cKDTree(ps.points).query(np.asarray(test_points, dtype=float))
    return float(np.max(dist))


def integer_root(N: int, n: int) -> int:
    """Largest integer ``k`` with ``k**n <= N``."""
    if N < 0 or n < 1:
        raise ValueError("need N >= 0 and n >= 1")
    k = int(round(N ** (1.0 / n)))
    while k**n > N:
        k -= 1
    while (k + 1) ** n <= N:
        k += 1
    return k


def covering_radius_general_lower(N: int, n: int) -> float:
    """Lower bound ``1 / (2 floor(N^(1/n)))`` valid for any ``N`` points in the unit cube."""
    if N < 1 or n < 1:
        raise ValueError("N and n must be positive")
    return 1.0 / (2 * integer_root(N, n))


def separation_distance(points) -> float:
    """Smallest pairwise Euclidean distance."""
    x = np.asarray(points, dtype=float)
    if x.shape[0] < 2:
        raise ValueError("separation distance needs at least two points")
    return float(pdist(x).min())


def covering_radius_upper_retro(points, restarts: int = 10, rng: np.random.Generator | None = None) -> float:
    """Best covering-radius upper bound over ``restarts`` mean-split partitions of the set."""
    from .stratify import mean_split_partition

    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if rng is None:
        raise ValueError("a random stream is required")
    ps = as_pointset(points)
    best = np.inf
    for child in spawn(rng, restarts):
        strat = mean_split_partition(ps, child)
        best = min(best, covering_radius_upper(ps.points, strat))
    return float(best)


def covering_radius_bounds(points, strat: Stratification, M: int | None, rng: np.random.Generator) -> CoveringRadiusBounds:
    ps = as_pointset(points)
    M = default_mc_samples(ps.dim) if M is None else int(M)
    return CoveringRadiusBounds(
        upper=covering_radius_upper(ps.points, strat),
        mc_lower=covering_radius_mc_lower(ps, M, rng),
        general_lower=covering_radius_general_lower(len(ps), ps.dim),
        mc_samples=M,
    )
