"""Point generators: one point per stratum, plus baseline designs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Hyperbox, PointSet, Stratification

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


class _Infinity:
    """Token for the degenerate Bates parameter (the stratum centroid)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def parse_bates(value) -> int | _Infinity:
    """Accept a positive integer, or ``"inf"`` / ``INFINITY`` / ``math.inf``."""
    if value is INFINITY:
        return INFINITY
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "∞"):
            return INFINITY
        value = int(value)
    if isinstance(value, float) and math.isinf(value):
        return INFINITY
    if int(value) != value or int(value) < 1:
        raise ValueError(f"Bates parameter must be a positive integer or 'inf', got {value!r}")
    return int(value)


def bates_points(lower, upper, b, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw one point per row of ``lower``/``upper``; each coordinate is the mean of ``b`` uniforms.

    ``b = INFINITY`` returns the box midpoints and consumes no randomness.
    """
    b = parse_bates(b)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if b is INFINITY:
        return (lower + upper) / 2
    if rng is None:
        raise ValueError("a random stream is required for finite b")
    u = rng.random(lower.shape + (b,)).mean(axis=-1)
    return lower + (upper - lower) * u


def sample_stratified(strat: Stratification, b=1, rng: np.random.Generator | None = None) -> PointSet:
    """One point per stratum, in stratum order."""
    if np.any(strat.counts != 1):
        raise ValueError("sample_stratified needs a stratification with one point per stratum")
    pts = bates_points(strat.lower, strat.upper, b, rng)
    # guards against rounding past a box edge
    pts = np.clip(pts, strat.lower, strat.upper)
    return PointSet(pts, strat.domain)


def sample_srs(N: int, domain: Hyperbox, rng: np.random.Generator) -> PointSet:
    pts = domain.lo + domain.extent * rng.random((int(N), domain.dim))
    return PointSet(pts, domain)


def sample_lhs(N: int, n: int, rng: np.random.Generator) -> PointSet:
    """Latin hypercube sample in the unit cube: one point per ``1/N`` bin and dimension."""
    N, n = int(N), int(n)
    perms = np.column_stack([rng.permutation(N) for _ in range(n)])
    pts = (perms + rng.random((N, n))) / N
    # (N-1 + u)/N can round to exactly 1.0 only when u rounds up; keep it in bin
    pts = np.minimum(pts, np.nextafter((perms + 1) / N, 0))
    return PointSet(pts)


def radical_inverse(indices, base: int) -> np.ndarray:
    """Van der Corput radical inverse of nonnegative integers in ``base``."""
    k = np.array(indices, dtype=np.int64)
    result = np.zeros(k.shape)
    scale = 1.0 / base
    while np.any(k > 0):
        k, digit = np.divmod(k, base)
        result += digit * scale
        scale /= base
    return result


def sample_halton(N: int, n: int, start_index: int = 0) -> PointSet:
    """Plain Halton points; point ``i`` uses index ``start_index + i + 1``."""
    if n > len(PRIMES):
        raise ValueError(f"Halton is tabulated for at most {len(PRIMES)} dimensions, got {n}")
    idx = np.arange(int(N), dtype=np.int64) + int(start_index) + 1
    return PointSet(np.column_stack([radical_inverse(idx, p) for p in PRIMES[:n]]))


@dataclass(frozen=True)
class KorobovSpec:
    N: int
    multiplier: int
    shift: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "shift", tuple(float(s) for s in self.shift))
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.N > 1 and not 1 <= self.multiplier <= self.N - 1:
            raise ValueError("multiplier must lie in [1, N-1]")
        if any(not 0.0 <= s < 1.0 for s in self.shift):
            raise ValueError("shift components must lie in [0, 1)")


def korobov_generator(N: int, a: int, n: int) -> np.ndarray:
    """Generating vector ``(1, a, a**2, ...) mod N`` of length ``n``."""
    gen = [1 % N if N > 1 else 0]
    for _ in range(n - 1):
        gen.append(gen[-1] * a % N)
    return np.array(gen, dtype=np.int64)


def korobov_points(N: int, a: int, n: int, shift=None) -> np.ndarray:
    gen = korobov_generator(N, a, n)
    i = np.arange(N, dtype=np.int64)[:, None]
    pts = (i * gen[None, :] % N) / N
    if shift is not None:
        pts = pts + np.asarray(shift, dtype=float)[None, :]
        pts -= np.floor(pts)
    return pts


def sample_korobov(spec: KorobovSpec, n: int) -> PointSet:
    if len(spec.shift) != n:
        raise ValueError(f"shift has {len(spec.shift)} components, need {n}")
    return PointSet(korobov_points(spec.N, spec.multiplier, n, spec.shift))


def is_latin(points) -> bool:
    x = np.asarray(points)
    N = x.shape[0]
    bins = np.minimum(np.floor(x * N).astype(np.int64), N - 1)
    return all(len(np.unique(bins[:, k])) == N for k in range(x.shape[1]))


def select_korobov(N: int, n: int, trials: int, rng: np.random.Generator, latin: bool = False) -> KorobovSpec:
    """Best of ``trials`` random multipliers by separation distance, then randomly shifted.

    When ``trials >= N - 1`` every multiplier is examined instead.  With
    ``latin`` only multipliers whose unshifted lattice has Latin projections
    are considered; random candidates are redrawn until they qualify.
    """
    from .metrics import separation_distance

    N, n, trials = int(N), int(n), int(trials)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if N < 2:
        return KorobovSpec(N, 1, rng.random(n))

    def admissible(a: int) -> bool:
        # projection k is a permutation of the bins iff its generator entry is a unit mod N
        return not latin or all(math.gcd(int(g), N) == 1 for g in korobov_generator(N, a, n))

    if trials >= N - 1:
        candidates = [a for a in range(1, N) if admissible(a)]
    else:
        candidates = []
        while len(candidates) < trials:
            a = int(rng.integers(1, N))
            if admissible(a):
                candidates.append(a)
    scores = [separation_distance(korobov_points(N, a, n)) for a in candidates]
    best = candidates[int(np.argmax(scores))]
    return shifted_korobov(N, best, n, rng, latin)


def shifted_korobov(N: int, a: int, n: int, rng: np.random.Generator, latin: bool = False) -> KorobovSpec:
    """Attach a uniform random shift to the lattice with multiplier ``a``."""
    shift = rng.random(n)
    if latin and not is_latin(korobov_points(N, a, n, shift)):
        # rounding at a bin edge can break a projection; a mid-bin shift leaves half a bin of slack
        shift = (np.floor(shift * N) + 0.5) / N
    return KorobovSpec(N, a, shift)
