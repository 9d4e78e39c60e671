from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from stratarium.geometry import Hyperbox, PointSet
from stratarium.metrics import discrepancy_t_sq, expected_discrepancy_sq
from stratarium.rng import make_rng
from stratarium.sample import (INFINITY, KorobovSpec, bates_points, is_latin, korobov_points,
                               parse_bates, radical_inverse, sample_halton, sample_korobov, sample_lhs,
                               sample_srs, sample_stratified, select_korobov)
from stratarium.stratify import GssOptions, grid_partition, gss_partition


def test_parse_bates():
    assert parse_bates("inf") is INFINITY
    assert parse_bates(float("inf")) is INFINITY
    assert parse_bates("8") == 8
    for bad in (0, -1, 1.5, "x"):
        with pytest.raises(ValueError):
            parse_bates(bad)


def test_centroid_sampling_consumes_no_randomness():
    strat = gss_partition(50, Hyperbox.unit(3), GssOptions(True, make_rng(0)))
    rng = make_rng(1)
    before = rng.bit_generator.state
    pts = sample_stratified(strat, INFINITY, rng)
    assert rng.bit_generator.state == before
    assert np.array_equal(pts.points, strat.centroids)


def test_centroid_grid_is_sukharev():
    pts = sample_stratified(grid_partition((2, 2)), INFINITY)
    assert {tuple(p) for p in pts.points.tolist()} == {(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)}


@pytest.mark.parametrize("b", [1, 2, 8, INFINITY])
def test_points_stay_in_their_strata(b):
    strat = gss_partition(333, Hyperbox.unit(4), GssOptions(True, make_rng(2)))
    pts = sample_stratified(strat, b, make_rng(3)).points
    assert np.all((pts >= strat.lower) & (pts <= strat.upper))


def test_uniform_sampling_mean_is_centroid():
    lower, upper = np.array([0.2, 0.0]), np.array([0.5, 0.25])
    reps = 100_000
    pts = bates_points(np.tile(lower, (reps, 1)), np.tile(upper, (reps, 1)), 1, make_rng(4))
    sigma = (upper - lower) / np.sqrt(12) / np.sqrt(reps)
    assert np.all(np.abs(pts.mean(axis=0) - (lower + upper) / 2) < 3 * sigma)


@pytest.mark.parametrize("b", [1, 2, 8])
def test_bates_variance(b):
    lower, upper = np.array([0.0, 0.3]), np.array([1.0, 0.4])
    reps = 100_000
    pts = bates_points(np.tile(lower, (reps, 1)), np.tile(upper, (reps, 1)), b, make_rng(b))
    expected = (upper - lower) ** 2 / (12 * b)
    assert np.allclose(pts.var(axis=0, ddof=1), expected, rtol=0.05)


def test_sample_stratified_needs_unit_counts():
    from stratarium.geometry import Stratification
    strat = Stratification([[0.0]], [[1.0]], [2], Hyperbox.unit(1))
    with pytest.raises(ValueError):
        sample_stratified(strat, 1, make_rng(0))


def test_srs_basic():
    one = sample_srs(1, Hyperbox.unit(1), make_rng(0)).points
    assert one.shape == (1, 1) and 0 <= one[0, 0] <= 1
    big = sample_srs(100_000, Hyperbox.unit(2), make_rng(1)).points
    assert np.all(np.abs(big.mean(axis=0) - 0.5) < 3 / np.sqrt(12) / np.sqrt(100_000))


def test_srs_on_box():
    dom = Hyperbox((-np.pi, -np.pi), (np.pi, np.pi))
    pts = sample_srs(1000, dom, make_rng(0))
    assert pts.domain == dom


def test_srs_discrepancy_expectation():
    rng = make_rng(7)
    sq = [discrepancy_t_sq(sample_srs(100, Hyperbox.unit(2), rng)) for _ in range(200)]
    assert np.mean(sq) == pytest.approx(expected_discrepancy_sq(100, 2), rel=0.10)
    assert expected_discrepancy_sq(100, 2) == pytest.approx(2.0833333e-4, rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(1, 500), n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_lhs_projections_are_latin(N, n, seed):
    pts = sample_lhs(N, n, make_rng(seed)).points
    bins = np.floor(pts * N).astype(int)
    for k in range(n):
        assert sorted(bins[:, k]) == list(range(N))


def test_lhs_fig1_size():
    pts = sample_lhs(196, 2, make_rng(0)).points
    assert is_latin(pts)


def test_radical_inverse_base_two():
    assert radical_inverse([1, 2, 3], 2).tolist() == [0.5, 0.25, 0.75]
    assert radical_inverse([0], 5).tolist() == [0.0]


def test_halton_examples():
    first = sample_halton(1, 2).points
    assert first[0, 0] == 0.5
    assert first[0, 1] == pytest.approx(1 / 3, abs=1e-15)
    assert np.array_equal(sample_halton(50, 5, 3).points, sample_halton(50, 5, 3).points)
    # start index shifts the sequence
    assert np.array_equal(sample_halton(10, 2, 5).points, sample_halton(15, 2).points[5:])
    with pytest.raises(ValueError):
        sample_halton(10, 21)


def test_korobov_diagonal():
    pts = sample_korobov(KorobovSpec(4, 1, (0.0, 0.0)), 2).points
    assert pts.tolist() == [[0, 0], [0.25, 0.25], [0.5, 0.5], [0.75, 0.75]]


def test_korobov_shift_recovered_from_first_point():
    spec = KorobovSpec(31, 12, (0.3, 0.7, 0.05))
    pts = sample_korobov(spec, 3).points
    assert pts[0] == pytest.approx(spec.shift, abs=1e-15)


@pytest.mark.parametrize("N", [7, 12, 30, 101])
def test_korobov_coprime_multipliers_are_latin(N):
    for a in range(1, N):
        if gcd(a, N) == 1:
            pts = korobov_points(N, a, 4)
            bins = np.rint(pts * N).astype(int)
            for k in range(4):
                assert np.array_equal(np.sort(bins[:, k]), np.arange(N))


def test_select_korobov_single_trial():
    rng_a, rng_b = make_rng(3), make_rng(3)
    spec = select_korobov(50, 3, 1, rng_a)
    a = int(rng_b.integers(1, 50))
    assert spec.multiplier == a


def test_select_korobov_exhaustive_small_case():
    # brute force: separation of every multiplier for N=4, n=2
    seps = {a: pdist(korobov_points(4, a, 2)).min() for a in (1, 2, 3)}
    assert seps[1] == pytest.approx(np.sqrt(2) / 4)
    assert seps[3] == pytest.approx(np.sqrt(2) / 4)
    assert seps[2] == pytest.approx(0.5)
    spec = select_korobov(4, 2, 3, make_rng(0))
    assert spec.multiplier == 2


def test_select_korobov_is_argmax_of_candidates():
    N, n = 97, 3
    spec = select_korobov(N, n, 10, make_rng(5))
    rng = make_rng(5)
    cands = [int(rng.integers(1, N)) for _ in range(10)]
    best = max(pdist(korobov_points(N, a, n)).min() for a in cands)
    assert pdist(korobov_points(N, spec.multiplier, n)).min() == best


@pytest.mark.parametrize("N", [25, 64, 100, 625])
def test_latin_korobov_is_latin(N):
    for seed in range(5):
        spec = select_korobov(N, 4, 30, make_rng(seed), latin=True)
        assert is_latin(sample_korobov(spec, 4))


def test_generators_are_deterministic():
    for make in (lambda r: sample_srs(20, Hyperbox.unit(3), r), lambda r: sample_lhs(20, 3, r),
                 lambda r: sample_korobov(select_korobov(20, 3, 5, r), 3)):
        assert np.array_equal(np.asarray(make(make_rng(11))), np.asarray(make(make_rng(11))))
