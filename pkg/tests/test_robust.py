import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcout.robust import (
    MAD_SCALE,
    l1_median,
    mad,
    median,
    quantile,
    robust_kurtosis_weight,
    robust_sphere,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
samples = st.lists(finite_floats, min_size=1, max_size=40)


class TestMedian:
    def test_odd(self):
        assert median([3, 1, 2]) == 2

    def test_even_mean_of_middle_pair(self):
        assert median([1, 2, 3, 4]) == 2.5

    def test_constant(self):
        assert median([5, 5, 5]) == 5

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            median([])

    @given(samples)
    def test_permutation_invariant(self, xs):
        rng = np.random.default_rng(0)
        shuffled = rng.permutation(xs)
        assert median(xs) == median(shuffled)


class TestMad:
    def test_one_to_five(self):
        # deviations from the median 3 are {2,1,0,1,2}; their median is 1
        assert mad([1, 2, 3, 4, 5]) == pytest.approx(1.4826, abs=1e-12)

    def test_constant_sample_is_zero(self):
        assert mad([7, 7, 7, 7]) == 0.0

    def test_consistent_for_sigma_at_the_normal(self):
        rng = np.random.Generator(np.random.Philox(1))
        draws = rng.standard_normal(10000)
        assert 1.4826 * 0.6 * 0.95 <= mad(draws) <= 1.4826 * 0.8 * 1.05

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            mad([])

    @given(samples)
    def test_permutation_invariant(self, xs):
        rng = np.random.default_rng(1)
        assert mad(xs) == mad(rng.permutation(xs))

    @given(samples, st.floats(-100, 100), st.floats(-100, 100))
    def test_scale_equivariant_location_invariant(self, xs, a, b):
        xs = np.asarray(xs)
        assert mad(a * xs + b) == pytest.approx(abs(a) * mad(xs), rel=1e-9, abs=1e-9)


class TestQuantile:
    def test_extremes(self):
        assert quantile([1, 2, 3], 0.0) == 1
        assert quantile([1, 2, 3], 1.0) == 3

    def test_one_third_of_six_by_the_linear_rule(self):
        # h = (6 - 1)/3 = 5/3: interpolate between the 2nd and 3rd order stats
        assert quantile([1, 2, 3, 4, 5, 6], 1 / 3) == pytest.approx(8 / 3, abs=1e-12)

    def test_out_of_range_errors(self):
        with pytest.raises(ValueError):
            quantile([1, 2], 1.5)
        with pytest.raises(ValueError):
            quantile([1, 2], -0.1)

    @given(samples)
    def test_half_quantile_is_the_median(self, xs):
        assert quantile(xs, 0.5) == pytest.approx(median(xs), rel=1e-12, abs=1e-12)


def _l1_objective(X, mu):
    return float(np.sqrt(((X - mu) ** 2).sum(axis=1)).sum())


class TestL1Median:
    def test_square_center(self):
        X = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], float)
        assert l1_median(X) == pytest.approx([0.5, 0.5], abs=1e-8)

    def test_equilateral_triangle_centroid(self):
        X = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
        assert l1_median(X) == pytest.approx([0.5, math.sqrt(3) / 6], abs=1e-8)

    def test_beats_every_grid_candidate(self):
        rng = np.random.Generator(np.random.Philox(2))
        X = rng.standard_normal((200, 2)) * [2.0, 0.5] + [1.0, -3.0]
        mu = l1_median(X)
        best = _l1_objective(X, mu)
        offsets = np.arange(-0.05, 0.0501, 0.01)
        for dx in offsets:
            for dy in offsets:
                assert best <= _l1_objective(X, mu + [dx, dy]) + 1e-9

    def test_orthogonally_equivariant(self):
        rng = np.random.Generator(np.random.Philox(3))
        X = rng.standard_normal((50, 4))
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        assert l1_median(X @ Q) == pytest.approx(l1_median(X) @ Q, abs=1e-6)

    def test_coincident_point_is_handled(self):
        # the coordinatewise median (the start) coincides with a data point
        X = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        assert l1_median(X) == pytest.approx([0.0, 0.0], abs=1e-8)

    def test_nonfinite_errors(self):
        with pytest.raises(ValueError):
            l1_median(np.array([[0.0, np.nan]]))


class TestRobustSphere:
    def test_single_column_values(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0], [5.0]])
        Xs, params = robust_sphere(X)
        expected = (X[:, 0] - 3.0) / 1.4826
        assert Xs[:, 0] == pytest.approx(expected, abs=1e-12)
        assert params.dropped_columns == frozenset()

    def test_constant_column_dropped_and_recorded(self):
        X = np.column_stack([np.array([4.0, 4.0, 4.0, 4.0]), np.arange(4.0)])
        Xs, params = robust_sphere(X)
        assert Xs.shape == (4, 1)
        assert params.dropped_columns == frozenset({0})
        assert list(params.kept_columns) == [1]

    def test_all_constant_errors(self):
        with pytest.raises(ValueError, match="nothing to analyze"):
            robust_sphere(np.ones((5, 3)))

    def test_resphering_is_identity(self):
        rng = np.random.Generator(np.random.Philox(4))
        X = rng.standard_normal((30, 4)) * [1, 10, 0.1, 100] + [5, -2, 0, 7]
        Xs, _ = robust_sphere(X)
        Xss, params = robust_sphere(Xs)
        assert params.dropped_columns == frozenset()
        assert Xss == pytest.approx(Xs, abs=1e-12)

    @given(st.integers(0, 2**32 - 1))
    def test_retained_columns_have_median_zero_mad_one(self, seed):
        rng = np.random.Generator(np.random.Philox(seed))
        X = rng.standard_normal((11, 3)) * 3.0 + 1.0
        Xs, _ = robust_sphere(X)
        assert np.abs(np.median(Xs, axis=0)).max() < 1e-12
        mads = MAD_SCALE * np.median(np.abs(Xs - np.median(Xs, axis=0)), axis=0)
        assert np.abs(mads - 1.0).max() < 1e-12

    def test_one_row_errors(self):
        with pytest.raises(ValueError):
            robust_sphere(np.array([[1.0, 2.0]]))


class TestRobustKurtosisWeight:
    def test_three_point_sample_by_hand(self):
        # med = 0, MAD = 1.4826, mean of fourth powers = 2/3
        expected = abs((2.0 / 3.0) / 1.4826**4 - 3.0)
        assert robust_kurtosis_weight([-1.0, 0.0, 1.0]) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(2.8620, abs=5e-5)

    def test_near_zero_for_normal_draws(self):
        rng = np.random.Generator(np.random.Philox(5))
        assert robust_kurtosis_weight(rng.standard_normal(10000)) < 0.5

    def test_gross_outlier_increases_the_weight(self):
        rng = np.random.Generator(np.random.Philox(6))
        base = rng.standard_normal(100)
        with_outlier = np.append(base, 50.0)
        assert robust_kurtosis_weight(with_outlier) > robust_kurtosis_weight(base)

    def test_zero_mad_errors(self):
        with pytest.raises(ValueError):
            robust_kurtosis_weight([1.0, 1.0, 1.0])
