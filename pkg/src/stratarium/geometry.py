"""Axis-aligned boxes, stratifications and point sets."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

#: absolute tolerance for geometric comparisons on unit-scale domains
TOL = 1e-12


@dataclass(frozen=True)
class Hyperbox:
    """Closed axis-aligned box ``[lower_1, upper_1] x ... x [lower_n, upper_n]``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) == 0 or len(lower) != len(upper):
            raise ValueError("lower and upper must have equal, nonzero length")
        if not all(lo < up for lo, up in zip(lower, upper)):
            raise ValueError(f"degenerate or inverted box: {lower} / {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit(cls, n: int) -> "Hyperbox":
        return cls((0.0,) * n, (1.0,) * n)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def extent(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def centroid(self) -> np.ndarray:
        return (self.lo + self.hi) / 2

    def contains(self, point, tol: float = TOL) -> bool:
        x = np.asarray(point, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def corners(self) -> np.ndarray:
        """All ``2**n`` corners as rows."""
        return np.array(list(itertools.product(*zip(self.lower, self.upper))))

    def is_unit(self) -> bool:
        return all(v == 0.0 for v in self.lower) and all(v == 1.0 for v in self.upper)


def volume(box: Hyperbox) -> float:
    return float(np.prod(box.extent))


def longest_side(box: Hyperbox, rng: np.random.Generator) -> int:
    """Index of the longest side; near-ties (within ``TOL``) are broken uniformly at random.

    The generator is only consulted when there is a tie.
    """
    return _longest_side(box.upper, box.lower, rng)


def _longest_side(upper: Sequence[float], lower: Sequence[float], rng: np.random.Generator) -> int:
    # plain-Python path; the partitioners call this once per split
    ext = [u - l for u, l in zip(upper, lower)]
    top = max(ext)
    tied = [i for i, e in enumerate(ext) if e >= top - TOL]
    if len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(len(tied)))]


def furthest_corner_distance(point, box: Hyperbox) -> float:
    """Euclidean distance from ``point`` to the corner of ``box`` furthest away."""
    x = np.asarray(point, dtype=float)
    if x.shape != (box.dim,):
        raise ValueError(f"point has shape {x.shape}, box has dimension {box.dim}")
    if not box.contains(x):
        raise ValueError(f"point {x.tolist()} lies outside box {box}")
    far = np.maximum(x - box.lo, box.hi - x)
    return float(np.sqrt(np.sum(far**2)))


@dataclass(frozen=True)
class Stratum:
    box: Hyperbox
    count: int

    def __post_init__(self):
        if int(self.count) < 1:
            raise ValueError("stratum count must be at least 1")


class Stratification:
    """A partition of ``domain`` into boxes, each with an assigned point count.

    Box bounds are held as ``(N, n)`` arrays; :attr:`strata` offers the
    per-stratum view.  Construction checks shapes, counts and containment;
    the quadratic disjointness check lives in :meth:`check`.
    """

    def __init__(self, lower, upper, counts, domain: Hyperbox):
        lower = np.array(lower, dtype=float, ndmin=2)
        upper = np.array(upper, dtype=float, ndmin=2)
        counts = np.array(counts, dtype=np.int64, ndmin=1)
        if lower.shape != upper.shape or lower.shape[1] != domain.dim:
            raise ValueError("bound arrays must both be (N, n) with n = domain.dim")
        if counts.shape != (lower.shape[0],):
            raise ValueError("need exactly one count per stratum")
        if lower.shape[0] == 0:
            raise ValueError("a stratification needs at least one stratum")
        if np.any(counts < 1):
            raise ValueError("stratum counts must be at least 1")
        if not np.all(lower < upper):
            raise ValueError("degenerate stratum")
        if np.any(lower < domain.lo - TOL) or np.any(upper > domain.hi + TOL):
            raise ValueError("stratum extends beyond the domain")
        for arr in (lower, upper, counts):
            arr.setflags(write=False)
        self.lower = lower
        self.upper = upper
        self.counts = counts
        self.domain = domain

    def __len__(self) -> int:
        return self.lower.shape[0]

    def __iter__(self) -> Iterator[Stratum]:
        return iter(self.strata)

    def __repr__(self) -> str:
        return f"Stratification(N={self.total}, strata={len(self)}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def strata(self) -> list[Stratum]:
        return [
            Stratum(Hyperbox(tuple(lo), tuple(up)), int(c))
            for lo, up, c in zip(self.lower, self.upper, self.counts)
        ]

    @property
    def volumes(self) -> np.ndarray:
        return np.prod(self.upper - self.lower, axis=1)

    @property
    def centroids(self) -> np.ndarray:
        return (self.lower + self.upper) / 2

    def box_set(self) -> set[tuple[tuple[float, ...], tuple[float, ...]]]:
        """Strata as a set of ``(lower, upper)`` tuples, for order-free comparison."""
        return {(tuple(lo), tuple(up)) for lo, up in zip(self.lower.tolist(), self.upper.tolist())}

    def check(self, rel_tol: float = 1e-12, proportional: bool = True) -> None:
        """Verify the partition invariants, raising ``AssertionError`` on failure.

        Checks that strata have pairwise disjoint interiors, that their
        volumes add up to the domain volume (which, given disjointness, means
        they cover it) and, if ``proportional``, that each volume is
        proportional to its count.
        """
        dom_vol = volume(self.domain)
        vols = self.volumes
        total = self.total
        if abs(vols.sum() - dom_vol) > rel_tol * dom_vol:
            raise AssertionError(f"volumes sum to {vols.sum()!r}, domain has {dom_vol!r}")
        expected = dom_vol * self.counts / total
        bad = np.abs(vols - expected) > rel_tol * expected
        if proportional and np.any(bad):
            j = int(np.argmax(bad))
            raise AssertionError(f"stratum {j} has volume {vols[j]!r}, expected {expected[j]!r}")
        n_strata = len(self)
        chunk = max(1, 4_000_000 // n_strata)
        for start in range(0, n_strata, chunk):
            stop = min(start + chunk, n_strata)
            overlap = np.ones((stop - start, n_strata), dtype=bool)
            for k in range(self.dim):
                lo = self.lower[start:stop, k, None]
                up = self.upper[start:stop, k, None]
                overlap &= (lo < self.upper[None, :, k] - TOL) & (self.lower[None, :, k] < up - TOL)
            rows = np.arange(stop - start)
            overlap[rows, start + rows] = False
            if overlap.any():
                i, j = np.argwhere(overlap)[0]
                raise AssertionError(f"strata {start + i} and {j} overlap")

    def to_json(self) -> str:
        doc = {
            "domain": {"lower": list(self.domain.lower), "upper": list(self.domain.upper)},
            "strata": [
                {"lower": lo, "upper": up, "count": int(c)}
                for lo, up, c in zip(self.lower.tolist(), self.upper.tolist(), self.counts.tolist())
            ],
        }
        # repr-based float formatting round-trips exactly
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Stratification":
        doc = json.loads(text)
        domain = Hyperbox(doc["domain"]["lower"], doc["domain"]["upper"])
        strata = doc["strata"]
        return cls(
            [s["lower"] for s in strata],
            [s["upper"] for s in strata],
            [s["count"] for s in strata],
            domain,
        )


class PointSet:
    """``N`` points in ``n`` dimensions, all inside ``domain``.

    Behaves like its ``(N, n)`` coordinate array under ``np.asarray``.
    """

    def __init__(self, points, domain: Hyperbox | None = None):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty (N, n) array")
        if domain is None:
            domain = Hyperbox.unit(pts.shape[1])
        if domain.dim != pts.shape[1]:
            raise ValueError("point dimension does not match the domain")
        outside = np.any((pts < domain.lo) | (pts > domain.hi), axis=1)
        if np.any(outside):
            row = int(np.argmax(outside))
            raise ValueError(f"row {row} lies outside the domain: {pts[row].tolist()}")
        pts.setflags(write=False)
        self.points = pts
        self.domain = domain

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.points
        return self.points.astype(dtype)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        return f"PointSet(N={len(self)}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def as_pointset(points, domain: Hyperbox | None = None) -> PointSet:
    if isinstance(points, PointSet):
        return points
    return PointSet(points, domain)
