"""Test functions and experiment harnesses.

Two experiments compare sampling designs: estimating the mean of a function
over the unit cube (reported as the spread of the estimates across
replications), and crude global minimization by evaluating the function on a
design scaled to ``[-pi, pi]^n``.  A third one compares the two
stratification variants by covering-radius upper bound.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special, stats

from .designs import Design
from .geometry import Hyperbox
from .metrics import covering_radius_upper
from .rng import make_rng
from .sample import INFINITY, sample_stratified
from .stratify import GssOptions, gss_partition

TIE_TOL = 1e-12
FP_COEF_RANGE = 100


def _rows(x) -> np.ndarray:
    return np.atleast_2d(np.asarray(x, dtype=float))


def _check_dim(x: np.ndarray, n: int | None) -> None:
    if n is not None and x.shape[-1] != n:
        raise ValueError(f"expected {n}-dimensional input, got {x.shape[-1]}")


def eval_sphere(x, n: int | None = None) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    _check_dim(x, n)
    return np.sum(x**2, axis=-1)


def eval_rosenbrock(x, n: int | None = None) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    _check_dim(x, n)
    if x.shape[-1] < 2:
        raise ValueError("Rosenbrock's function needs at least two dimensions")
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2, axis=-1)


def eval_doublesum(x, n: int | None = None) -> np.ndarray | float:
    """Schwefel's double sum ``sum_i (x_1 + ... + x_i)**2``."""
    x = np.asarray(x, dtype=float)
    _check_dim(x, n)
    return np.sum(np.cumsum(x, axis=-1) ** 2, axis=-1)


@dataclass(frozen=True)
class FletcherPowellInstance:
    """Random multimodal problem ``sum_i (A_i - B_i(x))**2`` with its global minimum 0 at ``alpha``."""

    a: np.ndarray
    b: np.ndarray
    alpha: np.ndarray
    target: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "target", self.a @ np.sin(self.alpha) + self.b @ np.cos(self.alpha))

    @property
    def dim(self) -> int:
        return len(self.alpha)

    @classmethod
    def generate(cls, n: int, rng: np.random.Generator, coef_range: int = FP_COEF_RANGE) -> "FletcherPowellInstance":
        a = rng.integers(-coef_range, coef_range + 1, size=(n, n)).astype(float)
        b = rng.integers(-coef_range, coef_range + 1, size=(n, n)).astype(float)
        alpha = rng.uniform(-np.pi, np.pi, n)
        return cls(a, b, alpha)

    @classmethod
    def from_seed(cls, seed: int, n: int) -> "FletcherPowellInstance":
        return cls.generate(n, make_rng(seed, "fletcher-powell", n))


def eval_fp(x, instance: FletcherPowellInstance) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    _check_dim(x, instance.dim)
    value = np.sin(x) @ instance.a.T + np.cos(x) @ instance.b.T
    return np.sum((instance.target - value) ** 2, axis=-1)


def inverse_normal_cdf(p, mean: float = 0.0, sd: float = 1.0):
    """Quantile function of the normal distribution with the given mean and standard deviation."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("probabilities must lie strictly between 0 and 1")
    if sd <= 0:
        raise ValueError("sd must be positive")
    out = special.ndtri(p) * sd + mean
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TestFunction:
    """A function on ``domain`` with a known minimizer and minimum."""

    __test__ = False  # not a pytest class

    name: str
    dimension: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    optimum_location: np.ndarray
    optimum_value: float
    domain: Hyperbox

    def __call__(self, x):
        return self.evaluate(x)


_BASE = {
    "sphere": (eval_sphere, 0.0),
    "rosenbrock": (eval_rosenbrock, 1.0),
    "doublesum": (eval_doublesum, 0.0),
}
FUNCTIONS = ("sphere", "rosenbrock", "doublesum", "fp")


def make_function(name: str, n: int, shift_to=None, instance: FletcherPowellInstance | None = None,
                  domain: Hyperbox | None = None) -> TestFunction:
    """Build a test function, optionally moved so its minimizer sits at ``shift_to``."""
    if domain is None:
        domain = Hyperbox((-np.pi,) * n, (np.pi,) * n)
    if name == "fp":
        if instance is None:
            raise ValueError("the FP function needs an instance")
        return TestFunction("fp", n, lambda x: eval_fp(x, instance), instance.alpha.copy(), 0.0, domain)
    if name not in _BASE:
        raise ValueError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    fn, base_opt = _BASE[name]
    base = np.full(n, base_opt)
    if shift_to is None:
        return TestFunction(name, n, lambda x: fn(x, n), base, 0.0, domain)
    offset = np.asarray(shift_to, dtype=float) - base
    return TestFunction(name, n, lambda x: fn(np.asarray(x) - offset, n), base + offset, 0.0, domain)


def random_instance(name: str, n: int, rng: np.random.Generator) -> TestFunction:
    """A random instance on ``[-pi, pi]^n`` whose minimizer is uniform in the domain."""
    if name == "fp":
        return make_function("fp", n, instance=FletcherPowellInstance.generate(n, rng))
    return make_function(name, n, shift_to=rng.uniform(-np.pi, np.pi, n))


@dataclass
class ExperimentReport:
    design: str
    function: str
    n: int
    N: int
    replications: int
    estimates: np.ndarray
    mean: float
    std: float
    median: float
    ci: tuple[float, float]
    seed: int

    CSV_FIELDS = ("design", "function", "n", "N", "replications", "mean", "std", "median", "ci_lo", "ci_hi", "seed")

    @classmethod
    def from_estimates(cls, design: str, function: str, n: int, N: int, estimates, seed: int) -> "ExperimentReport":
        est = np.asarray(estimates, dtype=float)
        R = len(est)
        std = float(np.std(est, ddof=1)) if R > 1 else 0.0
        return cls(design, function, n, N, R, est, float(np.mean(est)), std, float(np.median(est)),
                   bootstrap_mean_ci(est, make_rng(seed, f"bootstrap/{design}/{function}")), seed)

    def csv_row(self) -> list:
        return [self.design, self.function, self.n, self.N, self.replications, self.mean, self.std,
                self.median, self.ci[0], self.ci[1], self.seed]


def bootstrap_mean_ci(values, rng: np.random.Generator, level: float = 0.95, resamples: int = 2000) -> tuple[float, float]:
    """Percentile bootstrap confidence interval of the mean."""
    x = np.asarray(values, dtype=float)
    if len(x) < 2 or np.all(x == x[0]):
        return float(x.mean()), float(x.mean())
    res = stats.bootstrap((x,), np.mean, confidence_level=level, n_resamples=resamples,
                          method="percentile", random_state=rng)
    return float(res.confidence_interval.low), float(res.confidence_interval.high)


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("STRATARIUM_THREADS", "1")))
    except ValueError:
        return 1


def _run_replications(task: Callable[[int], float], R: int) -> np.ndarray:
    workers = min(max_workers(), R)
    if workers == 1:
        return np.array([task(r) for r in range(R)])
    with ThreadPoolExecutor(workers) as pool:
        return np.array(list(pool.map(task, range(R))))


def integrand(name: str, n: int, normal_mean: float | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Function of unit-cube points; with ``normal_mean`` the points are first mapped to ``N(mean, 1)``."""
    fn = {"sphere": eval_sphere, "rosenbrock": eval_rosenbrock, "doublesum": eval_doublesum}.get(name)
    if fn is None:
        raise ValueError(f"cannot integrate {name!r}")
    if normal_mean is None:
        return lambda u: fn(u, n)

    def transformed(u):
        # a zero or unit coordinate has no finite normal quantile
        u = np.clip(u, np.finfo(float).tiny, np.nextafter(1.0, 0))
        return fn(inverse_normal_cdf(u, normal_mean, 1.0), n)

    return transformed


def run_integration_experiment(design: Design, fn: str | Callable, N: int, n: int, R: int, seed: int,
                               normal_mean: float | None = None, fn_name: str | None = None) -> ExperimentReport:
    """Spread of mean estimates of ``fn`` over ``R`` replications of an ``N``-point design.

    ``fn`` is a function name (``rosenbrock``, ``doublesum``, ``sphere``) or a
    vectorized callable on ``(N, n)`` unit-cube points.  ``normal_mean``
    applies the inverse normal transform with that mean and unit variance.
    """
    if isinstance(fn, str):
        fn_name = fn_name or (fn if normal_mean is None else f"{fn}-normal{normal_mean:g}")
        fn = integrand(fn, n, normal_mean)
    fn_name = fn_name or getattr(fn, "__name__", "custom")
    label = f"integrate/{design.name}/{fn_name}/{N}/{n}"

    def one(r: int) -> float:
        pts, _ = design.generate(N, n, make_rng(seed, label, r))
        return float(np.mean(fn(np.asarray(pts))))

    return ExperimentReport.from_estimates(design.name, fn_name, n, N, _run_replications(one, R), seed)


def run_optimization_experiment(design: Design, fn_name: str, n: int, R: int, seed: int,
                                N: int | None = None) -> ExperimentReport:
    """Error of the best sampled value against the true minimum, over random instances.

    Each replication draws a fresh instance (shifted optimum, or a new FP
    problem) and a design of ``N = 50 n`` points scaled to ``[-pi, pi]^n``.
    """
    if fn_name not in FUNCTIONS:
        raise ValueError(f"unknown function {fn_name!r}")
    N = 50 * n if N is None else int(N)
    label = f"optimize/{design.name}/{fn_name}/{N}/{n}"
    inst_label = f"optimize-instance/{fn_name}/{n}"

    def one(r: int) -> float:
        func = random_instance(fn_name, n, make_rng(seed, inst_label, r))
        pts, _ = design.generate(N, n, make_rng(seed, label, r))
        x = func.domain.lo + func.domain.extent * np.asarray(pts)
        return float(np.min(func(x)) - func.optimum_value)

    return ExperimentReport.from_estimates(design.name, fn_name, n, N, _run_replications(one, R), seed)


@dataclass
class VariantTally:
    n: int
    wins_with: int = 0
    ties: int = 0
    wins_without: int = 0

    CSV_FIELDS = ("n", "wins_with_avoid", "ties", "wins_without_avoid")

    def csv_row(self) -> list:
        return [self.n, self.wins_with, self.ties, self.wins_without]


def gss_centroid_cr_upper(N: int, n: int, avoid_odd_splits: bool, rng: np.random.Generator) -> float:
    strat = gss_partition(N, Hyperbox.unit(n), GssOptions(avoid_odd_splits, rng))
    return covering_radius_upper(sample_stratified(strat, INFINITY), strat)


def run_variant_comparison(N_range=range(4, 1025), n_range=range(2, 11), seed: int = 0) -> list[VariantTally]:
    """Wins, ties and losses of odd-split avoidance by covering-radius upper bound with centroid points."""
    tallies = []
    for n in n_range:
        tally = VariantTally(n)
        for N in N_range:
            with_avoid = gss_centroid_cr_upper(N, n, True, make_rng(seed, f"variants/with/{n}", N))
            without = gss_centroid_cr_upper(N, n, False, make_rng(seed, f"variants/without/{n}", N))
            if abs(with_avoid - without) <= TIE_TOL:
                tally.ties += 1
            elif with_avoid < without:
                tally.wins_with += 1
            else:
                tally.wins_without += 1
        tallies.append(tally)
    return tallies
