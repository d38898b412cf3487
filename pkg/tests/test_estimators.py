import numpy as np
import pytest
from numpy.testing import assert_allclose

from logo.errors import DimensionMismatch, InsufficientData, ZeroVariance
from logo.estimators import (
    ObservationMatrix,
    estimate,
    shuffle_stationarize,
    standardize_columns,
)


def obs(rows, names=None):
    rows = np.asarray(rows, dtype=float)
    if names is None:
        names = tuple(f"v{i:03d}" for i in range(rows.shape[1]))
    return ObservationMatrix(names, rows)


class TestObservationMatrix:
    def test_shape_properties(self):
        m = obs([[1, 2], [3, 4], [5, 6]])
        assert (m.q, m.p) == (3, 2)

    def test_rejects_name_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ObservationMatrix(("a",), np.zeros((3, 2)))

    def test_rejects_duplicate_names(self):
        with pytest.raises(ValueError):
            ObservationMatrix(("a", "a"), np.zeros((3, 2)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            obs([[1, np.nan], [2, 3]])

    def test_single_row_is_a_legal_container(self):
        m = obs([[1, 2]])
        assert m.q == 1

    def test_select_columns(self):
        m = obs([[1, 2, 3], [4, 5, 6]])
        sub = m.select_columns([2, 0])
        assert sub.names == ("v002", "v000")
        assert_allclose(sub.data, [[3, 1], [6, 4]])


class TestEstimate:
    def test_hand_covariance(self):
        # rows (0,0) and (2,4): centered at (1,2), 1/q scaling
        pair = estimate(obs([[0, 0], [2, 4]]))
        assert_allclose(pair.cov.to_dense(), [[1.0, 2.0], [2.0, 4.0]])
        assert_allclose(pair.means, [1.0, 2.0])
        assert pair.n_obs == 2

    def test_three_rows(self):
        pair = estimate(obs([[1, 1], [2, 3], [3, 2]]))
        assert_allclose(pair.cov.to_dense(), [[2 / 3, 1 / 3], [1 / 3, 2 / 3]])
        assert_allclose(pair.corr.to_dense(), [[1.0, 0.5], [0.5, 1.0]])

    def test_correlation_clipped_and_unit_diag(self):
        rng = np.random.default_rng(0)
        pair = estimate(obs(rng.standard_normal((40, 6))))
        corr = pair.corr.to_dense()
        assert_allclose(np.diag(corr), np.ones(6), rtol=0, atol=0)
        assert np.all(np.abs(corr) <= 1.0)

    def test_matches_numpy_ml_covariance(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((37, 5))
        pair = estimate(obs(x))
        assert_allclose(pair.cov.to_dense(), np.cov(x, rowvar=False, bias=True),
                        atol=1e-12)

    def test_zero_variance_column(self):
        with pytest.raises(ZeroVariance) as exc:
            estimate(obs([[1, 5], [2, 5], [3, 5]]))
        assert exc.value.column == 1

    def test_needs_two_rows(self):
        with pytest.raises(InsufficientData):
            estimate(obs([[1, 2]]))


class TestStandardize:
    def test_unit_sample_variance(self):
        rng = np.random.default_rng(2)
        m = standardize_columns(obs(3 + 5 * rng.standard_normal((50, 4))))
        assert_allclose(m.data.mean(axis=0), np.zeros(4), atol=1e-12)
        assert_allclose(m.data.std(axis=0, ddof=1), np.ones(4), atol=1e-12)

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            standardize_columns(obs([[1, 2], [1, 3], [1, 4]]))


class TestShuffleStationarize:
    def test_rows_preserved(self):
        rng = np.random.default_rng(3)
        m = obs(rng.standard_normal((20, 3)))
        shuffled = shuffle_stationarize(m, seed=7)
        # same multiset of rows, contemporaneous structure intact
        order = np.lexsort(m.data.T)
        order_s = np.lexsort(shuffled.data.T)
        assert_allclose(m.data[order], shuffled.data[order_s])
        assert not np.array_equal(m.data, shuffled.data)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        m = obs(rng.standard_normal((15, 2)))
        a = shuffle_stationarize(m, seed=9)
        b = shuffle_stationarize(m, seed=9)
        assert np.array_equal(a.data, b.data)
