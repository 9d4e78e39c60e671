import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratarium import stratify
from stratarium.geometry import Hyperbox, PointSet
from stratarium.rng import make_rng
from stratarium.stratify import (GssOptions, aspect_ratio, grid_partition, gss_partition,
                                 mean_split_partition, split_counts)


class ScriptedRng:
    """Stands in for a generator: never swaps and always takes the first tied side."""

    def random(self):
        return 0.99

    def integers(self, high):
        return 0


def gss(N, n, seed=0, avoid=True):
    return gss_partition(N, Hyperbox.unit(n), GssOptions(avoid, make_rng(seed)))


def test_single_stratum():
    strat = gss(1, 2)
    assert strat.box_set() == {((0.0, 0.0), (1.0, 1.0))}
    assert strat.counts.tolist() == [1]


def test_three_strata_trace():
    strat = gss_partition(3, Hyperbox.unit(2), GssOptions(True, ScriptedRng()))
    assert strat.box_set() == {
        ((0.0, 0.0), (1 / 3, 1.0)),
        ((1 / 3, 0.0), (1.0, 0.5)),
        ((1 / 3, 0.5), (1.0, 1.0)),
    }
    assert np.allclose(strat.volumes, 1 / 3, rtol=1e-12)
    assert aspect_ratio(strat) == pytest.approx(1 / 3)


@pytest.mark.parametrize("seed", range(5))
def test_four_strata_is_the_grid(seed):
    assert gss(4, 2, seed).box_set() == grid_partition((2, 2)).box_set()


def test_six_splits_four_two():
    assert sorted(split_counts(6, True)) == [2, 4]
    assert split_counts(6, False) == (3, 3)
    assert split_counts(10, True) == (4, 6)
    assert split_counts(7, True) == (3, 4)
    assert split_counts(4, True) == (2, 2)


@pytest.mark.parametrize("seed", range(10))
def test_six_first_split_never_three_three(seed, monkeypatch):
    calls = []
    original = stratify._split_box

    def spy(lower, upper, dim, frac):
        calls.append(frac)
        return original(lower, upper, dim, frac)

    monkeypatch.setattr(stratify, "_split_box", spy)
    gss(6, 3, seed)
    assert calls[0] in (2 / 6, 4 / 6)


@pytest.mark.parametrize("N,n", [(1, 1), (2, 3), (7, 2), (100, 5), (513, 10)])
def test_split_count_is_linear(N, n, monkeypatch):
    calls = []
    original = stratify._split_box
    monkeypatch.setattr(stratify, "_split_box", lambda *a: calls.append(1) or original(*a))
    gss(N, n)
    assert len(calls) == N - 1


def test_grid_examples():
    quarters = grid_partition((2, 2))
    assert quarters.box_set() == {
        ((0.0, 0.0), (0.5, 0.5)), ((0.0, 0.5), (0.5, 1.0)),
        ((0.5, 0.0), (1.0, 0.5)), ((0.5, 0.5), (1.0, 1.0)),
    }
    thirds = grid_partition((3,))
    assert thirds.box_set() == {((0.0,), (1 / 3,)), ((1 / 3,), (2 / 3,)), ((2 / 3,), (1.0,))}
    big = grid_partition((12, 12))
    assert len(big) == 144
    big.check()
    assert aspect_ratio(big) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        grid_partition(())


def test_grid_uneven_bins():
    strat = grid_partition((3, 2, 1))
    assert len(strat) == 6
    strat.check()


def test_aspect_ratio_of_144_matches_published_values():
    # 1/1.777... with odd-split avoidance, 1/2.777... without
    for seed in range(5):
        assert aspect_ratio(gss(144, 2, seed, avoid=True)) == pytest.approx(9 / 16, abs=1e-12)
        assert aspect_ratio(gss(144, 2, seed, avoid=False)) == pytest.approx(9 / 25, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(1, 600), n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1), avoid=st.booleans())
def test_gss_invariants(N, n, seed, avoid):
    strat = gss_partition(N, Hyperbox.unit(n), GssOptions(avoid, make_rng(seed)))
    assert len(strat) == N and strat.total == N
    strat.check()
    assert aspect_ratio(strat) >= 1 / 3 - 1e-12


def test_gss_on_non_unit_domain():
    domain = Hyperbox((-1, 2), (3, 4))
    strat = gss_partition(37, domain, GssOptions(True, make_rng(5)))
    strat.check()
    assert np.allclose(strat.volumes, 8 / 37, rtol=1e-12)


def test_gss_rejects_bad_input():
    with pytest.raises(ValueError):
        gss_partition(0, Hyperbox.unit(2))
    with pytest.raises(TypeError):
        gss_partition(3, ((0, 0), (1, 1)))


def test_gss_is_deterministic_given_seed():
    a, b = gss(321, 4, seed=9), gss(321, 4, seed=9)
    assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)


def test_mean_split_two_points():
    strat = mean_split_partition(PointSet([[0.2], [0.8]]), make_rng(0))
    assert strat.lower.ravel().tolist() == [0.0, 0.5]
    assert strat.upper.ravel().tolist() == [0.5, 1.0]


def test_mean_split_three_points_trace():
    strat = mean_split_partition(PointSet([[0.1], [0.2], [0.9]]), make_rng(0))
    # stratum i holds point i
    assert strat.lower.ravel().tolist() == pytest.approx([0.0, 0.15, 0.55])
    assert strat.upper.ravel().tolist() == pytest.approx([0.15, 0.55, 1.0])


def test_mean_split_single_point_is_domain():
    strat = mean_split_partition(PointSet([[0.3, 0.4]]), make_rng(0))
    assert strat.box_set() == {((0.0, 0.0), (1.0, 1.0))}


def test_mean_split_coincident_points():
    with pytest.raises(ValueError, match="coincident"):
        mean_split_partition(PointSet([[0.3, 0.3], [0.1, 0.9], [0.3, 0.3]]), make_rng(0))


def test_mean_split_falls_back_to_separable_dimension():
    # equal first coordinates; the longest side (dim 0) cannot separate them
    pts = PointSet([[0.5, 0.2], [0.5, 0.7]])
    strat = mean_split_partition(pts, make_rng(0))
    strat.check(proportional=False)
    assert np.all((pts.points >= strat.lower) & (pts.points <= strat.upper))


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 300), n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_mean_split_invariants(N, n, seed):
    rng = make_rng(seed)
    pts = rng.random((N, n))
    strat = mean_split_partition(PointSet(pts), rng)
    assert len(strat) == N
    assert np.all((pts >= strat.lower) & (pts <= strat.upper))
    strat.check(proportional=False)
