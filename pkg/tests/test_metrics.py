import numpy as np
import pytest

from hebblearn import (
    CodeMatrix,
    InvalidInputError,
    binary_quantize,
    calibrate_bias,
    empirical_entropy,
    nearest_center_error,
    random_unit_vectors,
    reconstruction_error,
    weight_correlations,
)


class TestCalibrateBias:
    def _setup(self, n=2000, k=6, d=12, seed=0):
        rng = np.random.default_rng(seed)
        centers = random_unit_vectors(k, d, rng)
        X = random_unit_vectors(n, d, rng)
        return centers, X

    def test_rate_one_always_fires(self):
        centers, X = self._setup()
        b = calibrate_bias(centers, X, 1.0)
        rates = (X @ centers.T > b).mean(axis=0)
        np.testing.assert_array_equal(rates, 1.0)

    def test_rate_zero_never_fires(self):
        centers, X = self._setup()
        b = calibrate_bias(centers, X, 0.0)
        assert not np.any(X @ centers.T > b)

    def test_half_rate_is_median(self):
        centers, X = self._setup(n=101)
        b = calibrate_bias(centers, X, 0.5)
        sims = X @ centers.T
        # 101 samples, 50 should fire: bias sits at the 51st order statistic.
        np.testing.assert_allclose(b, np.sort(sims, axis=0)[50], atol=1e-15)

    @pytest.mark.parametrize("rate", [0.1, 0.2, 0.5, 0.9])
    def test_achieved_rate_within_one_over_n(self, rate):
        centers, X = self._setup(n=1777, seed=3)
        b = calibrate_bias(centers, X, rate)
        rates = (X @ centers.T > b).mean(axis=0)
        assert np.all(np.abs(rates - rate) <= 1.0 / 1777)

    def test_empty_data_rejected(self):
        with pytest.raises(InvalidInputError):
            calibrate_bias(np.eye(3), np.empty((0, 3)), 0.5)


class TestBinaryQuantize:
    def test_zero_code_is_all_zero_word(self):
        assert not binary_quantize(np.zeros(5)).any()

    def test_positive_entries_set_bits(self):
        bits = binary_quantize(np.array([0.3, 0.0, 1.2]))
        np.testing.assert_array_equal(bits, [True, False, True])

    def test_distinct_words_bounded_by_pigeonhole(self):
        rng = np.random.default_rng(1)
        codes = np.maximum(0.0, rng.standard_normal((300, 4)))
        bits = binary_quantize(codes)
        distinct = np.unique(bits, axis=0).shape[0]
        assert distinct <= min(300, 2 ** 4)


class TestEmpiricalEntropy:
    def test_identical_words_zero_bits(self):
        bits = np.ones((50, 6), dtype=bool)
        assert empirical_entropy(bits) == 0.0

    def test_all_distinct_words_log2_n(self):
        bits = np.eye(8, dtype=bool)
        assert empirical_entropy(bits) == pytest.approx(3.0, abs=1e-12)

    def test_hand_computed_pmf(self):
        # Counts (2, 1, 1) over four observations: H = 1.5 bits exactly.
        bits = np.array([[1, 0], [1, 0], [0, 1], [1, 1]], dtype=bool)
        assert empirical_entropy(bits) == pytest.approx(1.5, abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 60))
            k = int(rng.integers(1, 12))
            bits = rng.random((n, k)) < 0.4
            h = empirical_entropy(bits)
            assert 0.0 <= h <= np.log2(min(n, 2 ** k)) + 1e-12

    def test_wide_codes_use_observed_support(self):
        # K > 64 exceeds any enumerable codebook; the plug-in estimate only
        # touches observed words.
        rng = np.random.default_rng(3)
        bits = rng.random((100, 80)) < 0.5
        h = empirical_entropy(bits)
        assert h == pytest.approx(np.log2(100), abs=1e-9)


class TestWeightCorrelations:
    def test_orthonormal_rows_all_zero(self):
        vals = weight_correlations(np.eye(5))
        assert vals.shape == (10,)
        np.testing.assert_allclose(vals, 0.0, atol=1e-15)

    def test_duplicate_row_yields_one(self):
        rng = np.random.default_rng(4)
        row = random_unit_vectors(1, 6, rng)[0]
        C = np.vstack([row, row, random_unit_vectors(1, 6, rng)])
        vals = weight_correlations(C)
        assert vals[-1] == pytest.approx(1.0, abs=1e-12)

    def test_fourteen_rows_give_91_pairs(self):
        rng = np.random.default_rng(5)
        vals = weight_correlations(random_unit_vectors(14, 30, rng))
        assert vals.shape == (91,)
        assert np.all(np.diff(vals) >= 0)   # sorted ascending

    def test_single_row_empty(self):
        assert weight_correlations(np.array([[1.0, 0.0]])).size == 0


class TestErrors:
    def test_reconstruction_error_extremes(self):
        x = np.array([1.0, 0.0])
        assert reconstruction_error(x, x) == 0.0
        assert reconstruction_error(x, -x) == 2.0
        assert reconstruction_error(x, np.array([0.0, 1.0])) == 1.0

    def test_nearest_center_error(self):
        centers = np.eye(3)
        assert nearest_center_error(centers[1], centers) == 0.0
        x = np.array([0.0, 0.0, -1.0])
        # Best cosine to any axis center is 0 from the two orthogonal ones.
        assert nearest_center_error(x, np.eye(3)[:2]) == 1.0

    def test_nearest_center_matches_bruteforce(self):
        rng = np.random.default_rng(6)
        centers = random_unit_vectors(7, 5, rng)
        for _ in range(30):
            x = random_unit_vectors(1, 5, rng)[0]
            expected = min(1.0 - c @ x for c in centers)
            assert nearest_center_error(x, centers) == pytest.approx(expected, abs=1e-14)


class TestCodeMatrix:
    def test_encode_matches_direct_formula(self):
        rng = np.random.default_rng(7)
        centers = random_unit_vectors(4, 6, rng)
        X = random_unit_vectors(50, 6, rng)
        b = calibrate_bias(centers, X, 0.5)
        cm = CodeMatrix.encode(centers, b, X)
        np.testing.assert_array_equal(cm.codes, np.maximum(0.0, X @ centers.T - b))
        assert np.all(cm.codes >= 0.0)
