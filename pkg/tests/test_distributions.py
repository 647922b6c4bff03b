import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize, stats

from entrans import distributions as di

SQRT_PI = math.sqrt(math.pi)


def test_g_lambda():
    assert di.g_lambda(0.0, 0.1) == 0
    assert di.g_lambda(0.25, 0.01) == pytest.approx(75)
    with pytest.raises(ValueError):
        di.g_lambda(0.5, 0.1)
    with pytest.raises(ValueError):
        di.g_lambda(0.2, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 1).filter(lambda x: x - 0.5 > 1e-6), st.floats(1e-8, 10))
def test_g_lambda_symmetric(x, lam):
    # 1 - x is exact for x in [1/2, 1]
    assert di.g_lambda(x, lam) == pytest.approx(di.g_lambda(1 - x, lam), rel=1e-9, abs=1e-300)


def test_u2_normalization_and_cdf():
    total = integrate.quad(di.density_u2, 0, 1, limit=200)[0] + integrate.quad(di.density_u2, 1, np.inf, limit=200)[0]
    assert total == pytest.approx(1, abs=1e-6)
    for u in (0.01, 0.3, 1.0, 7.0, 300.0):
        assert di.cdf_u2(u) == pytest.approx(integrate.quad(di.density_u2, 0, u, limit=200)[0], abs=1e-9)


def test_u2_integral_representation():
    for u in (1e-3, 0.05, 1.0, 40.0, 1e5):
        ref = integrate.quad(lambda t: 0.25 * math.exp(-t - t * t * u / 4) * t * t, 0, np.inf, epsabs=0, epsrel=1e-12)[0]
        assert di.density_u2(u) == pytest.approx(ref, rel=1e-8)


def test_u2_series_branch_continuity():
    a = di.density_u2(di.U2_SERIES_MAX * (1 - 1e-9))
    b = di.density_u2(di.U2_SERIES_MAX * (1 + 1e-9))
    assert a == pytest.approx(b, rel=1e-9)
    assert di.density_u2(0.0) == 0
    assert np.all(np.isfinite(di.density_u2(np.logspace(-8, 12, 50))))


def test_u2_tail():
    u = 1e6
    assert di.density_u2(u) == pytest.approx(SQRT_PI / (2 * u**1.5), rel=0.01)


def test_u2_monte_carlo():
    # u = w/s^2 with w ~ Exp(1) and s ~ Exp(rate 2)
    rng = np.random.default_rng(2024)
    n = 4_000_000
    u = rng.exponential(1.0, n) / rng.exponential(0.5, n) ** 2
    for u0 in (0.1, 1.0, 10.0):
        lo, hi = u0 * 0.98, u0 * 1.02
        est = np.count_nonzero((u > lo) & (u < hi)) / (n * (hi - lo))
        assert est == pytest.approx(di.density_u2(u0), rel=0.02)


def test_levy():
    assert di.cdf_levy(np.inf) == pytest.approx(1, abs=1e-10)
    assert integrate.quad(di.density_levy, 0, 50)[0] == pytest.approx(di.cdf_levy(50), abs=1e-10)
    mode = optimize.minimize_scalar(lambda u: -di.density_levy(u), bounds=(0.1, 10), method="bounded", options={"xatol": 1e-10}).x
    assert mode == pytest.approx(math.pi**2 / 6, abs=1e-4)
    for u in (1e4, 1e8):
        assert di.density_levy(u) / (SQRT_PI / (2 * u**1.5)) == pytest.approx(1, abs=3e-3)
    # shared u^{-3/2} prefactor with the u2 density
    u = 1e7
    assert di.density_levy(u) / di.density_u2(u) == pytest.approx(math.exp(-math.pi**2 / (4 * u)), rel=1e-3)


def test_half_normal():
    assert integrate.quad(di.density_half_normal, 0, np.inf)[0] == pytest.approx(1, abs=1e-10)
    mean = integrate.quad(lambda x: x * di.density_half_normal(x), 0, np.inf)[0]
    assert mean == pytest.approx(2 / math.pi**1.5, abs=1e-10)
    assert di.cdf_half_normal(0.7) == pytest.approx(integrate.quad(di.density_half_normal, 0, 0.7)[0], abs=1e-12)


def test_purity_u():
    assert di.purity_u(1.0, 0.1) == math.inf
    assert di.purity_u(0.75, 0.5) == pytest.approx(math.sqrt(2 * 0.5 * 0.5 / 0.25))
    with pytest.raises(ValueError):
        di.purity_u(0.5, 0.1)
    with pytest.raises(ValueError):
        di.purity_u(1.2, 0.1)
    s = di.rescale_purity([0.4, 0.8, 1.0], 0.01)
    assert s.excluded == 2 and len(s) == 1


def test_marcenko_pastur():
    assert di.mp_support(1) == (0.0, 4.0)
    for q in (1.0, 2.0, 5.0):
        lo, hi = di.mp_support(q)
        norm = integrate.quad(di.marcenko_pastur, lo, hi, args=(q,), limit=200)[0]
        mean = integrate.quad(lambda x: x * di.marcenko_pastur(x, q), lo, hi, limit=200)[0]
        assert norm == pytest.approx(1, abs=1e-8)
        assert mean == pytest.approx(1, abs=1e-8)
        for x in np.linspace(lo, hi, 7)[1:-1]:
            ref = integrate.quad(di.marcenko_pastur, lo, x, args=(q,), limit=200)[0]
            assert di.marcenko_pastur_cdf(x, q) == pytest.approx(ref, abs=1e-7)
    assert di.marcenko_pastur(5.0) == 0
    with pytest.raises(ValueError):
        di.mp_support(0.5)


def test_rescaled_sample_validation():
    with pytest.raises(ValueError):
        di.RescaledSample("u2", [1.0, np.nan])
    with pytest.raises(ValueError):
        di.RescaledSample("bogus", [1.0])


def test_rescale_g_exclusion():
    s = di.rescale_g([0.1, 0.5, 0.5 - 1e-12, 0.3], 0.01, "u2")
    assert s.excluded == 2 and len(s) == 2
    s1 = di.rescale_g([0.9, 0.5 + 1e-12], 0.01, "u1")
    assert s1.excluded == 1
    with pytest.raises(ValueError):
        di.rescale_g([0.1], 0.01, "mp")


def test_rescale_extremes():
    n = 5
    flat = np.full((2, n), 1 / n)
    tw, ex = di.rescale_extremes(flat, n)
    assert np.allclose(tw.values, (1 / n - 4 / n) * 2 ** (-4 / 3) * n ** (5 / 3))
    prod = np.zeros((1, n))
    prod[0, 0] = 1
    assert di.rescale_extremes(prod, n)[1].values[0] == 0


def test_unentangled_spectra_are_degenerate_points():
    spectra = np.zeros((10, 4))
    spectra[:, 0] = 1
    u2 = di.rescale_g(spectra[:, 1], 0.01, "u2")
    u1 = di.rescale_g(spectra[:, 0], 0.01, "u1")
    assert np.all(u2.values == 0) and np.all(np.isfinite(u1.values))
    tw, ex = di.rescale_extremes(spectra, 4)
    assert np.all(np.isfinite(tw.values)) and np.all(ex.values == 0)
    assert np.all(np.isfinite(di.rescale_mp(spectra).values))


def test_ks_distance_examples():
    assert di.ks_distance([0.0], stats.norm.cdf) == pytest.approx(0.5)
    n = 200
    grid = stats.norm.ppf((np.arange(n) + 0.5) / n)
    assert di.ks_distance(grid, stats.norm.cdf) <= 1 / n
    with pytest.raises(ValueError):
        di.ks_distance([], stats.norm.cdf)


def test_ks_distance_matches_scipy():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(500)
    assert di.ks_distance(x, stats.norm.cdf) == pytest.approx(stats.kstest(x, "norm").statistic, abs=1e-14)


def test_ks_distance_large_sample_calibration():
    rng = np.random.default_rng(4)
    hits = [di.ks_distance(rng.exponential(size=100_000), di.exponential_cdf) <= 0.01 for _ in range(20)]
    assert all(hits)


def test_ks_window():
    rng = np.random.default_rng(5)
    x = rng.exponential(size=50_000)
    assert di.ks_distance_window(x, di.exponential_cdf, 0.5, 2.0) <= 0.02
    f = di.truncated_cdf(di.exponential_cdf, 0.5, 2.0)
    assert f(0.5) == 0 and f(2.0) == 1


@pytest.mark.parametrize("log", [False, True])
def test_histogram_integral_and_merge(log):
    rng = np.random.default_rng(6)
    a = rng.uniform(0.1, 9, 1000)
    b = rng.uniform(0.1, 9, 500)
    h = di.Histogram.from_samples(a, 0.1, 9.0, 30, log=log)
    assert h.integral() == pytest.approx(1, abs=1e-6)
    h2 = di.Histogram.from_samples(b, 0.1, 9.0, 30, log=log)
    assert h.merge(h2) == di.Histogram.from_samples(np.concatenate([a, b]), 0.1, 9.0, 30, log=log)
    assert h.merge(h2) == h2.merge(h)
    with pytest.raises(ValueError):
        h.merge(di.Histogram.empty(0.1, 9.0, 31, log=log))


def test_histogram_flow_and_empty():
    h = di.Histogram.from_samples([-1.0, 0.5, 2.0, np.nan], 0.0, 1.0, 4)
    assert h.underflow == 1 and h.overflow == 1 and h.total == 1
    assert np.all(di.Histogram.empty(0, 1, 3).density == 0)
    with pytest.raises(ValueError):
        di.Histogram.empty(0.0, 1.0, 3, log=True)


def test_tail_slope_power_law():
    rng = np.random.default_rng(7)
    # Pareto with density ∝ u^{-3/2}
    u = (1 - rng.random(400_000)) ** -2.0
    assert di.tail_slope(u, 10, 1e4) == pytest.approx(-1.5, abs=0.05)
    with pytest.raises(ValueError):
        di.tail_slope([1.0], 10, 100)


def test_tw_wrappers():
    assert di.tw2_cdf(-20.0) == 0 and di.tw2_cdf(20.0) == 1
    assert 0 < di.tw2_pdf(-1.8) < 1
