import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from hebblearn import (
    InvalidInputError,
    VmfComponent,
    log_bessel_i,
    log_normalizer,
    mean_resultant_length,
    random_unit_vectors,
    sample_mixture,
    sample_vmf,
    vmf_logpdf,
)


def bessel_ratio_cf(nu, x, depth=None):
    """Oracle: I_nu(x)/I_{nu-1}(x) via the backward continued fraction."""
    if depth is None:
        depth = int(2 * x) + 200
    r = 0.0
    for j in range(depth - 1, -1, -1):
        r = 1.0 / (2.0 * (nu + j) / x + r)
    return r


def unit(v):
    return np.asarray(v, dtype=float) / np.linalg.norm(v)


class TestSampler:
    def test_rows_unit_norm(self):
        comp = VmfComponent(unit(np.arange(1, 31)), 150.0, 2000)
        x = sample_vmf(comp, np.random.default_rng(0))
        assert x.shape == (2000, 30)
        np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-9)

    def test_uniform_mean_small(self):
        # kappa = 0 is uniform on the sphere: the sample mean shrinks ~ 1/sqrt(n).
        comp = VmfComponent(unit(np.ones(30)), 0.0, 100_000)
        x = sample_vmf(comp, np.random.default_rng(1))
        assert np.linalg.norm(x.mean(axis=0)) < 0.02

    @pytest.mark.parametrize("d", [3, 30])
    @pytest.mark.parametrize("kappa", [1.0, 50.0, 100.0, 150.0])
    def test_mean_resultant_length_vs_cf_oracle(self, d, kappa):
        mu = unit(np.arange(1, d + 1))
        comp = VmfComponent(mu, kappa, 100_000)
        x = sample_vmf(comp, np.random.default_rng(int(kappa) + d))
        empirical = np.linalg.norm(x.mean(axis=0))
        expected = bessel_ratio_cf(d / 2.0, kappa)
        assert abs(empirical - expected) <= 0.02 * expected

    @pytest.mark.parametrize("d", [3, 10, 30])
    @pytest.mark.parametrize("kappa", [1.0, 50.0, 150.0])
    def test_acceptance_rate_above_30_percent(self, d, kappa):
        comp = VmfComponent(unit(np.ones(d)), kappa, 20_000)
        _, stats = sample_vmf(comp, np.random.default_rng(7), return_stats=True)
        assert stats["accepted"] / stats["proposals"] > 0.30

    def test_deterministic_given_seed(self):
        comp = VmfComponent(unit([1.0, 2.0, 3.0]), 25.0, 500)
        a = sample_vmf(comp, np.random.default_rng(42))
        b = sample_vmf(comp, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)

    def test_rejects_dimension_below_two(self):
        comp = VmfComponent(np.array([1.0]), 5.0, 10)
        with pytest.raises(InvalidInputError):
            sample_vmf(comp, np.random.default_rng(0))

    def test_component_validation(self):
        with pytest.raises(InvalidInputError):
            VmfComponent(np.array([1.0, 1.0]), 5.0, 10)   # not unit
        with pytest.raises(InvalidInputError):
            VmfComponent(np.array([1.0, 0.0]), -1.0, 10)  # negative kappa

    def test_mean_direction_recovered_at_high_kappa(self):
        mu = unit(np.arange(1, 31))
        comp = VmfComponent(mu, 150.0, 50_000)
        x = sample_vmf(comp, np.random.default_rng(3))
        assert unit(x.mean(axis=0)) @ mu > 0.9999


class TestMixture:
    def test_paper_scale_shape(self):
        rng = np.random.default_rng(0)
        mus = random_unit_vectors(5, 30, rng)
        comps = [VmfComponent(m, 150.0, 1000) for m in mus]
        x, labels = sample_mixture(comps, rng)
        assert x.shape == (5000, 30)
        assert labels.shape == (5000,)
        np.testing.assert_array_equal(np.bincount(labels), [1000] * 5)

    def test_single_component_labels_zero(self):
        comp = VmfComponent(unit([1.0, 1.0, 1.0]), 10.0, 50)
        _, labels = sample_mixture([comp], np.random.default_rng(0))
        assert np.all(labels == 0)

    def test_label_histogram_matches_counts(self):
        mus = random_unit_vectors(2, 4, np.random.default_rng(1))
        comps = [VmfComponent(mus[0], 5.0, 2), VmfComponent(mus[1], 5.0, 3)]
        _, labels = sample_mixture(comps, np.random.default_rng(2), shuffle=True)
        np.testing.assert_array_equal(np.bincount(labels), [2, 3])

    def test_shuffle_is_seeded_permutation(self):
        mus = random_unit_vectors(2, 6, np.random.default_rng(5))
        comps = [VmfComponent(m, 20.0, 100) for m in mus]
        x1, l1 = sample_mixture(comps, np.random.default_rng(9), shuffle=True)
        x2, l2 = sample_mixture(comps, np.random.default_rng(9), shuffle=True)
        np.testing.assert_array_equal(x1, x2)
        np.testing.assert_array_equal(l1, l2)


class TestLogPdf:
    def test_kappa_zero_is_uniform_on_s2(self):
        comp = VmfComponent(unit([0.0, 0.0, 1.0]), 0.0, 1)
        val = vmf_logpdf(np.array([0.0, 1.0, 0.0]), comp)
        assert val == pytest.approx(-math.log(4.0 * math.pi), abs=1e-12)

    def test_maximized_at_mean_direction(self):
        rng = np.random.default_rng(0)
        mu = unit(rng.standard_normal(8))
        comp = VmfComponent(mu, 12.0, 1)
        others = random_unit_vectors(200, 8, rng)
        assert np.all(vmf_logpdf(others, comp) <= vmf_logpdf(mu, comp) + 1e-12)

    def test_d3_closed_form(self):
        # For d = 3 the normalizer reduces to kappa / (4 pi sinh kappa).
        kappa = 2.0
        mu = unit([1.0, 2.0, 2.0])
        comp = VmfComponent(mu, kappa, 1)
        expected = math.log(kappa / (4.0 * math.pi * math.sinh(kappa))) + kappa
        assert vmf_logpdf(mu, comp) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("d,kappa", [(5, 3.0), (12, 40.0)])
    def test_density_integrates_to_one(self, d, kappa):
        # Reduce the sphere integral to the cosine against mu.
        log_omega = math.log(2.0) + ((d - 1) / 2.0) * math.log(math.pi) \
            - math.lgamma((d - 1) / 2.0)
        logz = log_normalizer(d, kappa)

        def density(t):
            return math.exp(logz + kappa * t + log_omega
                            + ((d - 3) / 2.0) * math.log1p(-t * t))

        total, _ = scipy.integrate.quad(density, -1.0, 1.0)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_rejects_non_unit_input(self):
        comp = VmfComponent(unit([1.0, 0.0]), 3.0, 1)
        with pytest.raises(InvalidInputError):
            vmf_logpdf(np.array([2.0, 0.0]), comp)


class TestLogBessel:
    @pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 7.5, 14.0, 24.0])
    @pytest.mark.parametrize("x", [0.5, 2.0, 9.0, 15.0, 50.0, 150.0, 800.0])
    def test_matches_scipy_scaled_bessel(self, nu, x):
        expected = math.log(scipy.special.ive(nu, x)) + x
        assert log_bessel_i(nu, x) == pytest.approx(expected, rel=1e-10)

    def test_mean_resultant_length_matches_cf(self):
        for d, kappa in [(3, 2.0), (30, 150.0), (10, 60.0)]:
            assert mean_resultant_length(d, kappa) == pytest.approx(
                bessel_ratio_cf(d / 2.0, kappa), rel=1e-9)

    def test_kappa_zero(self):
        assert mean_resultant_length(30, 0.0) == 0.0
