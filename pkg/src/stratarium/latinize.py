"""Latin hypercube property for stratified samples, and partially stratified designs.

In each dimension the ``N`` strata must be assigned distinct bins
``[j/N, (j+1)/N)`` that overlap their extent.  ``algss`` takes the
assignment obtained by sorting strata by their midpoint and tolerates the
occasional stratum whose bin misses it; ``lgss`` repairs that assignment
into a perfect bipartite matching.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import TOL, PointSet, Stratification
from .rng import spawn


class LatinizationInfeasible(ValueError):
    """No perfect strata-to-bins matching exists in some dimension."""

    def __init__(self, dimension: int, matching_size: int, N: int):
        self.dimension = dimension
        self.matching_size = matching_size
        self.N = N
        super().__init__(
            f"latinization infeasible: dimension {dimension} admits a matching of "
            f"size {matching_size} < {N}"
        )


def _overlap(j, lower, upper, N: int):
    return np.minimum((j + 1) / N, upper) - np.maximum(j / N, lower)


def bin_ranges(lower, upper, N: int) -> tuple[np.ndarray, np.ndarray]:
    """First and last bin index overlapping each interval ``[lower, upper]`` with positive length.

    Empty ranges come back with ``first > last``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    first = np.clip(np.floor(lower * N).astype(np.int64), 0, N - 1)
    first = np.where(_overlap(first, lower, upper, N) > TOL, first, first + 1)
    last = np.clip(np.ceil(upper * N).astype(np.int64) - 1, 0, N - 1)
    last = np.where(_overlap(last, lower, upper, N) > TOL, last, last - 1)
    return first, last


def cog_assignment(strat: Stratification, rng: np.random.Generator | None = None) -> np.ndarray:
    """Bin per stratum and dimension from sorting strata by their midpoint.

    With ``rng``, ties in the midpoint are ordered by an independent random
    key in every dimension; without it they keep stratum order.  Index
    order is the same in all dimensions, so strata that were never split
    along several dimensions would get the same bin in each of them.

    Returns an ``(N, n)`` integer array whose columns are permutations of
    ``0..N-1``.
    """
    N = len(strat)
    assign = np.empty((N, strat.dim), dtype=np.int64)
    streams = spawn(rng, strat.dim) if rng is not None else [None] * strat.dim
    for k, child in enumerate(streams):
        cog = strat.centroids[:, k]
        if child is None:
            order = np.argsort(cog, kind="stable")
        else:
            order = np.lexsort((child.random(N), cog))
        assign[order, k] = np.arange(N)
    return assign


def _random_greedy(first, last, N: int, rng: np.random.Generator) -> np.ndarray:
    taken = np.zeros(N, dtype=bool)
    match = np.full(N, -1, dtype=np.int64)
    for s in rng.permutation(N):
        lo, hi = int(first[s]), int(last[s])
        if lo > hi:
            continue
        width = hi - lo + 1
        start = int(rng.integers(width))
        for off in range(width):
            v = lo + (start + off) % width
            if not taken[v]:
                taken[v] = True
                match[s] = v
                break
    return match


def hopcroft_karp(first: Sequence[int], last: Sequence[int], n_right: int, init=None) -> np.ndarray:
    """Maximum matching in a bipartite graph whose left vertex ``u`` links to right vertices ``first[u]..last[u]``.

    ``init`` is an optional starting matching (``-1`` = unmatched); entries
    that are not edges or that reuse a right vertex are dropped.  Returns
    the matched right vertex per left vertex, ``-1`` where unmatched.
    """
    first = [int(v) for v in first]
    last = [int(v) for v in last]
    n_left = len(first)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    if init is not None:
        for u, v in enumerate(np.asarray(init).tolist()):
            if v >= 0 and first[u] <= v <= last[u] and match_r[v] == -1:
                match_l[u] = v
                match_r[v] = u

    unmatched = -1
    while True:
        free = [u for u in range(n_left) if match_l[u] == -1 and first[u] <= last[u]]
        if not free:
            break
        dist = [unmatched] * n_left
        for u in free:
            dist[u] = 0
        queue = deque(free)
        limit = None
        while queue:
            u = queue.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for v in range(first[u], last[u] + 1):
                w = match_r[v]
                if w == -1:
                    if limit is None:
                        limit = dist[u] + 1
                elif dist[w] == unmatched:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if limit is None:
            break

        cursor = list(first)
        augmented = False
        for root in free:
            stack_u = [root]
            stack_v: list[int] = []
            while stack_u:
                u = stack_u[-1]
                pushed = False
                while cursor[u] <= last[u]:
                    v = cursor[u]
                    cursor[u] += 1
                    w = match_r[v]
                    if w == -1:
                        if dist[u] + 1 == limit:
                            stack_v.append(v)
                            for uu, vv in zip(stack_u, stack_v):
                                match_l[uu] = vv
                                match_r[vv] = uu
                            augmented = True
                            stack_u = []
                            pushed = True
                            break
                    elif dist[w] == dist[u] + 1 and dist[w] < limit:
                        stack_u.append(w)
                        stack_v.append(v)
                        pushed = True
                        break
                if not pushed:
                    dist[u] = unmatched - 1  # dead end for this phase
                    stack_u.pop()
                    if stack_v:
                        stack_v.pop()
        if not augmented:
            break
    return np.array(match_l, dtype=np.int64)


def matching_assignment(strat: Stratification, init: str = "cog", rng: np.random.Generator | None = None) -> np.ndarray:
    """Exact Latin bin assignment via maximum matching, one dimension at a time.

    ``init`` selects the warm start: ``"cog"`` (midpoint sort) or
    ``"random_greedy"``, which needs ``rng``.

    Raises
    ------
    LatinizationInfeasible
        If some dimension has no perfect matching.
    """
    if init not in ("cog", "random_greedy"):
        raise ValueError(f"unknown warm start {init!r}")
    N = len(strat)
    if init == "cog":
        cog = cog_assignment(strat, rng)
    elif rng is None:
        raise ValueError("random_greedy warm start needs a random stream")
    else:
        streams = spawn(rng, strat.dim)
    assign = np.empty((N, strat.dim), dtype=np.int64)
    for k in range(strat.dim):
        first, last = bin_ranges(strat.lower[:, k], strat.upper[:, k], N)
        if init == "cog":
            start = cog[:, k]
            if np.all((first <= start) & (start <= last)):
                assign[:, k] = start
                continue
        else:
            start = _random_greedy(first, last, N, streams[k])
        match = hopcroft_karp(first, last, N, init=start)
        size = int(np.count_nonzero(match >= 0))
        if size < N:
            raise LatinizationInfeasible(k, size, N)
        assign[:, k] = match
    return assign


def assignment_violations(strat: Stratification, assign: np.ndarray) -> np.ndarray:
    """Per dimension, the number of strata whose assigned bin misses their extent."""
    N = len(strat)
    return np.sum(_overlap(assign, strat.lower, strat.upper, N) <= TOL, axis=0)


def draw_assigned(strat: Stratification, assign: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates drawn uniformly in bin-stratum intersections.

    Where the assigned bin misses the stratum the coordinate is drawn in the
    stratum's extent instead and counted as a violation.  Each dimension uses
    its own child stream.
    """
    N, n = assign.shape
    lo = np.maximum(assign / N, strat.lower)
    hi = np.minimum((assign + 1) / N, strat.upper)
    ok = hi - lo > TOL
    lo = np.where(ok, lo, strat.lower)
    hi = np.where(ok, hi, strat.upper)
    pts = np.empty((N, n))
    for k, child in enumerate(spawn(rng, n)):
        pts[:, k] = lo[:, k] + (hi[:, k] - lo[:, k]) * child.random(N)
    # rounding can land a draw on the wrong side of a bin edge; the midpoint cannot
    wrong_bin = ok & (np.minimum(np.floor(pts * N), N - 1) != assign)
    mid = (lo + hi) / 2
    pts = np.where(wrong_bin | (pts >= hi), mid, pts)
    return pts, np.sum(~ok, axis=0)


def _require_unit_one_each(strat: Stratification) -> None:
    if not strat.domain.is_unit():
        raise ValueError("latinization needs a stratification of the unit hypercube")
    if np.any(strat.counts != 1):
        raise ValueError("latinization needs one point per stratum")


def algss(strat: Stratification, rng: np.random.Generator) -> tuple[PointSet, np.ndarray]:
    """Approximately latinized stratified sample and its per-dimension violation counts."""
    _require_unit_one_each(strat)
    assign_rng, draw_rng = spawn(rng, 2)
    pts, violations = draw_assigned(strat, cog_assignment(strat, assign_rng), draw_rng)
    return PointSet(pts), violations


def lgss(strat: Stratification, rng: np.random.Generator, init: str = "cog") -> PointSet:
    """Exactly latinized stratified sample: one point per stratum and per bin in every dimension."""
    _require_unit_one_each(strat)
    match_rng, draw_rng = spawn(rng, 2)
    assign = matching_assignment(strat, init=init, rng=match_rng)
    pts, _ = draw_assigned(strat, assign, draw_rng)
    return PointSet(pts)


def lh_violations(points) -> np.ndarray:
    """Per dimension, ``N`` minus the number of occupied ``1/N`` bins."""
    x = np.asarray(points, dtype=float)
    N = x.shape[0]
    bins = np.clip(np.floor(x * N).astype(np.int64), 0, N - 1)
    return np.array([N - len(np.unique(bins[:, k])) for k in range(x.shape[1])], dtype=np.int64)


@dataclass(frozen=True)
class PssGrouping:
    """Disjoint groups of dimension indices that together cover ``0..n-1``."""

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        flat = sorted(i for g in groups for i in g)
        if not groups or any(len(g) == 0 for g in groups) or flat != list(range(len(flat))):
            raise ValueError(f"groups must partition 0..n-1, got {groups}")
        object.__setattr__(self, "groups", groups)

    @property
    def dim(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def sizes(self) -> list[int]:
        return [len(g) for g in self.groups]

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "PssGrouping":
        """Parse ``"XxY[,XxY...]"`` (``Y`` groups of ``X`` consecutive dimensions).

        A trailing ``+XxY`` term is accepted as well, e.g. ``"2x2+1x2"``.
        When ``n`` is given, the groups must cover exactly ``n`` dimensions.
        """
        sizes: list[int] = []
        for term in text.replace("+", ",").split(","):
            term = term.strip()
            if not term:
                continue
            try:
                width, reps = (int(p) for p in term.lower().split("x"))
            except ValueError:
                raise ValueError(f"bad group term {term!r}; expected e.g. '2x50'") from None
            if width < 1 or reps < 1:
                raise ValueError(f"bad group term {term!r}")
            sizes.extend([width] * reps)
        if not sizes:
            raise ValueError("empty group spec")
        if n is not None and sum(sizes) != n:
            raise ValueError(f"group spec {text!r} covers {sum(sizes)} dimensions, need {n}")
        bounds = np.cumsum([0] + sizes)
        return cls(tuple(tuple(range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])))


def pss_compose(group_designs: Sequence, grouping: PssGrouping, rng: np.random.Generator) -> PointSet:
    """Pad lower-dimensional designs into one design after shuffling each one's rows."""
    designs = [np.asarray(d, dtype=float) for d in group_designs]
    if len(designs) != len(grouping.groups):
        raise ValueError(f"{len(designs)} designs for {len(grouping.groups)} groups")
    N = designs[0].shape[0]
    if any(d.shape[0] != N for d in designs):
        raise ValueError("all group designs must have the same number of points")
    out = np.empty((N, grouping.dim))
    for d, group in zip(designs, grouping.groups):
        if d.shape[1] != len(group):
            raise ValueError(f"design of dimension {d.shape[1]} for a group of size {len(group)}")
        out[:, list(group)] = d[rng.permutation(N)]
    return PointSet(out)
