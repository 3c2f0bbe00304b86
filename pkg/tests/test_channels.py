import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from haps_secrecy.channels import (
    REGIMES,
    FsoLink,
    ProbabilityAccuracyError,
    ShadowedRicianLink,
    clamp_probability,
    gg_cdf,
    gg_pdf,
    sample_gg,
    sample_sr,
    sr_ccdf,
    sr_cdf,
    sr_pdf,
)
from haps_secrecy.verification import ks_distance, ks_distance_bound

ALPHA, BETA = 8.9033, 7.3955


class TestShadowedRician:
    def test_fhs_rate(self, fhs_unit):
        # 1 / (2b + omega) for m = 1
        assert fhs_unit.lambda_z == pytest.approx(7.88059325105994, rel=1e-13)

    def test_fhs_cdf_value(self, fhs_unit):
        assert sr_cdf(0.1, fhs_unit) == pytest.approx(0.545273584325081, rel=1e-12)

    @pytest.mark.parametrize("name", sorted(REGIMES))
    @pytest.mark.parametrize("gamma_bar", [0.5, 1.0, 30.0])
    def test_normalization(self, name, gamma_bar):
        link = ShadowedRicianLink.from_regime(name, gamma_bar)
        total, _ = integrate.quad(lambda g: sr_pdf(g, link), 0, np.inf, limit=400, epsabs=1e-13)
        assert total == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("name", sorted(REGIMES))
    def test_mean_snr(self, name):
        link = ShadowedRicianLink.from_regime(name, 3.0)
        mean, _ = integrate.quad(lambda g: g * sr_pdf(g, link), 0, np.inf, limit=400)
        assert mean == pytest.approx(3.0 * (2 * link.b + link.omega), rel=1e-9)

    def test_m1_is_exponential(self):
        link = ShadowedRicianLink(1, 0.2, 0.7, 2.0)
        g = np.linspace(0, 10, 50)
        lam = 1.0 / (2.0 * (2 * 0.2 + 0.7))
        assert np.allclose(sr_pdf(g, link), lam * np.exp(-lam * g), rtol=1e-13, atol=0)

    def test_no_los_is_exponential(self):
        link = ShadowedRicianLink(5, 0.5, 0.0, 1.0)
        g = np.linspace(0, 10, 50)
        assert np.allclose(sr_ccdf(g, link), np.exp(-g), rtol=1e-13)

    @pytest.mark.parametrize("name", sorted(REGIMES))
    def test_cdf_monotone_and_complementary(self, name):
        link = ShadowedRicianLink.from_regime(name, 1.0)
        g = np.geomspace(1e-4, 200, 500)
        cdf = sr_cdf(g, link)
        assert np.all(np.diff(cdf) >= 0)
        assert np.allclose(cdf + sr_ccdf(g, link), 1.0, atol=1e-14)
        assert sr_cdf(0.0, link) == 0.0

    @pytest.mark.parametrize("name", sorted(REGIMES))
    def test_cdf_derivative_is_pdf(self, name):
        link = ShadowedRicianLink.from_regime(name, 1.0)
        for g in (0.05, 0.3, 1.0, 4.0):
            h = 1e-5 * g
            slope = (sr_cdf(g + h, link) - sr_cdf(g - h, link)) / (2 * h)
            assert slope == pytest.approx(sr_pdf(g, link), rel=1e-6)

    @pytest.mark.parametrize("name", sorted(REGIMES))
    def test_sampler_ks(self, name):
        link = ShadowedRicianLink.from_regime(name, 1.0)
        samples = sample_sr(link, 11, 100_000)
        assert ks_distance(samples, lambda g: sr_cdf(g, link)) < 0.005

    def test_sampler_deterministic(self, fhs_unit):
        assert np.array_equal(sample_sr(fhs_unit, 5, 1000), sample_sr(fhs_unit, 5, 1000))
        assert not np.array_equal(sample_sr(fhs_unit, 5, 1000), sample_sr(fhs_unit, 6, 1000))

    @pytest.mark.parametrize("m", [0, 2.5, -1])
    def test_rejects_bad_m(self, m):
        with pytest.raises(ValueError):
            ShadowedRicianLink(m, 0.1, 0.5, 1.0)

    def test_unknown_regime(self):
        with pytest.raises(ValueError, match="unknown shadowing regime"):
            ShadowedRicianLink.from_regime("XYZ", 1.0)


def mp_gg_pdf(g, alpha, beta, xi, mu):
    with mp.workdps(30):
        x2 = mp.mpf(xi) ** 2
        h = x2 * alpha * beta / (x2 + 1)
        z = h * mp.mpf(g) / mu
        kern = mp.meijerg([[], [x2 + 1]], [[x2, alpha, beta], []], z)
        return float(x2 / (mp.gamma(alpha) * mp.gamma(beta) * g) * kern)


class TestGammaGamma:
    def test_pdf_value(self):
        link = FsoLink(ALPHA, BETA, 6.7, 1, 1.0)
        # mpmath, 40 digits
        assert gg_pdf(1.0, link) == pytest.approx(0.77892190369520435127, rel=1e-10)

    @pytest.mark.parametrize("xi", [0.8, 6.7])
    @pytest.mark.parametrize("g", [1e-4, 0.3, 10.0, 400.0])
    def test_pdf_against_mpmath(self, xi, g):
        link = FsoLink(ALPHA, BETA, xi, 1, 10.0)
        assert gg_pdf(g, link) == pytest.approx(mp_gg_pdf(g, ALPHA, BETA, xi, 10.0), rel=1e-8)

    @pytest.mark.parametrize("xi", [0.8, 1.1, 6.7])
    @pytest.mark.parametrize("mu", [1.0, 10.0])
    def test_normalization(self, xi, mu):
        link = FsoLink(ALPHA, BETA, xi, 1, mu)
        # substitute g = exp(t) so the integrable singularity at 0 is harmless
        total, _ = integrate.quad(lambda t: math.exp(t) * gg_pdf(math.exp(t), link), -40, 12, limit=400)
        assert total == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("r", [1, 2])
    def test_cdf_limits(self, r):
        link = FsoLink(ALPHA, BETA, 1.1, r, 10.0)
        assert gg_cdf(0.0, link) == 0.0
        assert gg_cdf(math.inf, link) == 1.0
        assert gg_cdf(1e9, link) == pytest.approx(1.0, abs=1e-9)

    def test_cdf_monotone(self):
        link = FsoLink(ALPHA, BETA, 1.1, 2, 10.0)
        cdf = np.asarray(gg_cdf(np.geomspace(1e-3, 1e4, 60), link))
        assert np.all(np.diff(cdf) >= 0)

    @pytest.mark.parametrize("r", [1, 2])
    def test_cdf_derivative_is_pdf(self, r):
        link = FsoLink(ALPHA, BETA, 6.7, r, 10.0)
        for g in (0.5, 5.0, 20.0):
            h = 1e-5 * g
            slope = (gg_cdf(g + h, link) - gg_cdf(g - h, link)) / (2 * h)
            assert slope == pytest.approx(gg_pdf(g, link), rel=1e-5)

    @pytest.mark.parametrize("xi", [0.8, 6.7])
    @pytest.mark.parametrize("r", [1, 2])
    def test_sampler_ks(self, xi, r):
        link = FsoLink(ALPHA, BETA, xi, r, 10.0)
        samples = sample_gg(link, 3, 20_000)
        # rigorous upper bound on the KS statistic from every 25th order statistic
        assert ks_distance_bound(samples, lambda g: gg_cdf(g, link)) < 0.015

    def test_sampler_mean_r1(self):
        link = FsoLink(ALPHA, BETA, 6.7, 1, 10.0)
        assert sample_gg(link, 1, 1_000_000).mean() == pytest.approx(10.0, rel=3e-3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(alpha=0.0, beta=1.0, xi=1.0, r=1, mu_r=1.0),
            dict(alpha=1.0, beta=1.0, xi=-1.0, r=1, mu_r=1.0),
            dict(alpha=1.0, beta=1.0, xi=1.0, r=3, mu_r=1.0),
            dict(alpha=1.0, beta=1.0, xi=1.0, r=1, mu_r=0.0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            FsoLink(**kwargs)


def test_clamp():
    assert clamp_probability(1.0 + 1e-10) == 1.0
    assert clamp_probability(-1e-10) == 0.0
    with pytest.raises(ProbabilityAccuracyError):
        clamp_probability(1.01)


def test_ks_bound_dominates_exact_statistic():
    link = FsoLink(ALPHA, BETA, 1.1, 1, 10.0)
    samples = sample_gg(link, 9, 2_000)
    exact = ks_distance(samples, lambda g: gg_cdf(g, link))
    assert exact <= ks_distance_bound(samples, lambda g: gg_cdf(g, link)) <= exact + 25 / 2_000
