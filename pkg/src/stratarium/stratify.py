"""Builders for stratifications of a box.

``gss_partition`` recursively halves the longest side of a box, splitting
the point count as evenly as possible, which allows any number of strata.
``grid_partition`` is the conventional paraxial grid and
``mean_split_partition`` builds a one-point-per-box partition around an
existing point set after the fact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import Hyperbox, PointSet, Stratification, _longest_side, as_pointset
from .rng import make_rng


@dataclass
class GssOptions:
    avoid_odd_splits: bool = True
    rng: np.random.Generator = field(default_factory=make_rng)


def split_counts(count: int, avoid_odd_splits: bool) -> tuple[int, int]:
    """Divide ``count`` points into two parts ``(n_a, n_b)`` before any random swap.

    With ``avoid_odd_splits`` an even count of at least six is never split
    into two odd halves; 6 becomes (2, 4) rather than (3, 3).
    """
    n_a = count // 2
    if avoid_odd_splits and count >= 6 and n_a % 2 == 1 and count % 2 == 0:
        n_a -= 1
    return n_a, count - n_a


def _split_box(lower: list, upper: list, dim: int, frac: float) -> tuple[list, list, list, list]:
    pos = lower[dim] + (upper[dim] - lower[dim]) * frac
    upper_a = list(upper)
    upper_a[dim] = pos
    lower_b = list(lower)
    lower_b[dim] = pos
    return lower, upper_a, lower_b, upper


def gss_partition(N: int, domain: Hyperbox, options: GssOptions | None = None) -> Stratification:
    """Partition ``domain`` into ``N`` equal-volume boxes, one point each.

    Parameters
    ----------
    N : int
        Number of strata, at least 1.
    domain : Hyperbox
        The box to partition.
    options : GssOptions, optional
        Whether to avoid odd/odd splits, and the random stream used for the
        half swaps and for breaking ties between equally long sides.

    Returns
    -------
    Stratification
        ``N`` strata with count 1, each of volume ``volume(domain) / N``.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if not isinstance(domain, Hyperbox):
        raise TypeError("domain must be a Hyperbox")
    if options is None:
        options = GssOptions()
    rng = options.rng
    finished_lower, finished_upper = [], []
    pending = [(list(domain.lower), list(domain.upper), int(N))]
    while pending:
        lower, upper, count = pending.pop()
        if count == 1:
            finished_lower.append(lower)
            finished_upper.append(upper)
            continue
        n_a, n_b = split_counts(count, options.avoid_odd_splits)
        if rng.random() < 0.5:
            n_a, n_b = n_b, n_a
        dim = _longest_side(upper, lower, rng)
        lo_a, up_a, lo_b, up_b = _split_box(lower, upper, dim, n_a / count)
        pending.append((lo_b, up_b, n_b))
        pending.append((lo_a, up_a, n_a))
    return Stratification(finished_lower, finished_upper, np.ones(len(finished_lower), int), domain)


def grid_partition(k_per_dim: Sequence[int], domain: Hyperbox | None = None) -> Stratification:
    """Conventional stratification with ``k_per_dim[i]`` equal bins along dimension ``i``."""
    ks = [int(k) for k in k_per_dim]
    if not ks:
        raise ValueError("k_per_dim must not be empty")
    if any(k < 1 for k in ks):
        raise ValueError("bin counts must be positive")
    if domain is None:
        domain = Hyperbox.unit(len(ks))
    if domain.dim != len(ks):
        raise ValueError("k_per_dim length does not match domain dimension")
    edges = [lo + (up - lo) * np.arange(k + 1) / k for k, lo, up in zip(ks, domain.lower, domain.upper)]
    for e, up in zip(edges, domain.upper):
        e[-1] = up
    idx = np.stack(np.meshgrid(*[np.arange(k) for k in ks], indexing="ij"), axis=-1).reshape(-1, len(ks))
    lower = np.column_stack([edges[d][idx[:, d]] for d in range(len(ks))])
    upper = np.column_stack([edges[d][idx[:, d] + 1] for d in range(len(ks))])
    return Stratification(lower, upper, np.ones(len(idx), int), domain)


def mean_split_partition(points, rng: np.random.Generator) -> Stratification:
    """Partition the point set's domain so that every box holds exactly one point.

    Each box is split along its longest side (random tie-break).  The mean
    coordinate of the contained points gives a preliminary position; the
    split is placed halfway between the nearest points at or below and
    strictly above it.  When every contained point shares the coordinate
    along the longest side, the longest side among the separable dimensions
    is used instead.

    Stratum ``i`` of the result holds input point ``i``.
    """
    ps = as_pointset(points)
    x = ps.points
    N, n = x.shape
    box_lower = np.empty((N, n))
    box_upper = np.empty((N, n))
    pending = [(list(ps.domain.lower), list(ps.domain.upper), np.arange(N))]
    while pending:
        lower, upper, members = pending.pop()
        if len(members) == 1:
            box_lower[members[0]] = lower
            box_upper[members[0]] = upper
            continue
        sub = x[members]
        dim = _longest_side(upper, lower, rng)
        if sub[:, dim].min() == sub[:, dim].max():
            spread = sub.max(axis=0) > sub.min(axis=0)
            if not spread.any():
                raise ValueError(f"coincident points: {sub[0].tolist()} occurs {len(members)} times")
            cand = np.flatnonzero(spread)
            lo_c = [lower[i] for i in cand]
            up_c = [upper[i] for i in cand]
            dim = int(cand[_longest_side(up_c, lo_c, rng)])
        coords = sub[:, dim]
        prelim = coords.mean()
        below = coords[coords <= prelim].max()
        above = coords[coords > prelim].min()
        pos = (below + above) / 2
        left = coords <= below
        up_a = list(upper)
        up_a[dim] = pos
        lo_b = list(lower)
        lo_b[dim] = pos
        pending.append((lo_b, upper, members[~left]))
        pending.append((lower, up_a, members[left]))
    return Stratification(box_lower, box_upper, np.ones(N, int), ps.domain)


def aspect_ratio(strat: Stratification) -> float:
    """Smallest ratio of shortest to longest side over all strata."""
    ext = strat.upper - strat.lower
    return float(np.min(ext.min(axis=1) / ext.max(axis=1)))
