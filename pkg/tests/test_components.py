import numpy as np
import pytest

from ssimlab import (LocalStats, SsimParams, contrast_component, gaussian_kernel,
                     local_stats, luminance_component, structure_component)


def stats_of(mu_a=0.5, mu_b=0.5, var_a=0.0, var_b=0.0, cov=0.0):
    f = lambda v: np.array([[float(v)]])
    return LocalStats(f(mu_a), f(mu_b), f(var_a), f(var_b), f(cov))


P = SsimParams()


@pytest.mark.parametrize("mu", [0.0, 0.2, 0.5, 1.0])
def test_luminance_is_one_for_equal_means(mu):
    assert luminance_component(stats_of(mu, mu), P)[0, 0] == 1.0


def test_luminance_minimum_black_vs_white():
    assert luminance_component(stats_of(0.0, 1.0), P)[0, 0] == pytest.approx(
        0.01 ** 2 / (0.01 ** 2 + 1), rel=1e-12)
    assert round(luminance_component(stats_of(0.0, 1.0), P)[0, 0], 4) == 0.0001


def test_luminance_near_black():
    assert luminance_component(stats_of(0.0, 2 / 255), P)[0, 0] == pytest.approx(0.61914, abs=1e-5)


def test_contrast_equal_spread():
    assert contrast_component(stats_of(var_a=0.03, var_b=0.03), P)[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_contrast_minimum():
    c = contrast_component(stats_of(var_a=0.0, var_b=0.25), P)[0, 0]
    assert c == pytest.approx(0.03 ** 2 / (0.03 ** 2 + 0.25), rel=1e-12)
    assert round(c, 4) == 0.0036


def test_contrast_scalar_evaluation():
    c = contrast_component(stats_of(var_a=0.01, var_b=0.04), P)[0, 0]
    assert c == pytest.approx((2 * 0.1 * 0.2 + 0.0009) / (0.05 + 0.0009), rel=1e-12)
    assert c == pytest.approx(0.0409 / 0.0509, rel=1e-12)


def test_structure_perfect_correlation():
    assert structure_component(stats_of(var_a=0.04, var_b=0.09, cov=0.06), P)[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_structure_minimum():
    s = structure_component(stats_of(var_a=0.25, var_b=0.25, cov=-0.25), P)[0, 0]
    assert s == pytest.approx((2 * 0.03 ** 2 - 1) / (2 * 0.03 ** 2 + 1), rel=1e-12)
    assert round(s, 4) == -0.9964


def test_structure_without_constant_is_weighted_pearson(rng):
    w = gaussian_kernel(11, 1.5).weights
    params = SsimParams(c3=0.0)
    for _ in range(10):
        a = rng.random((11, 11))
        b = 0.5 * a + 0.5 * rng.random((11, 11))
        s = structure_component(local_stats(a, b, gaussian_kernel(11, 1.5)), params)[0, 0]
        c = np.cov(a.ravel(), b.ravel(), aweights=w.ravel(), bias=True)
        r = c[0, 1] / np.sqrt(c[0, 0] * c[1, 1])
        assert s == pytest.approx(r, abs=1e-10)


def test_zero_constants_treat_0_over_0_as_one():
    params = SsimParams(K1=0.0, K2=0.0)
    st = stats_of(0.0, 0.0)
    assert luminance_component(st, params)[0, 0] == 1.0
    assert contrast_component(st, params)[0, 0] == 1.0
    assert structure_component(st, params)[0, 0] == 1.0


def test_zero_constants_nonzero_over_zero_is_nan():
    params = SsimParams(K1=0.0, K2=0.0)
    # inconsistent on purpose: covariance without spread
    st = stats_of(var_a=0.0, var_b=0.0, cov=0.1)
    assert np.isnan(structure_component(st, params)[0, 0])
