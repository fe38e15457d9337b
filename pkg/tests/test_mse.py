import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ssimlab import SsimParams, gaussian_kernel, local_stats, ssim_maps
from ssimlab import mse, patterns

KERNEL = gaussian_kernel(11, 1.5)
W = KERNEL.weights


def test_local_mse_identical_is_zero(rng):
    a = rng.random((20, 20))
    assert np.all(mse.local_mse(local_stats(a, a, KERNEL)) == 0)


def test_local_mse_constant_pair():
    st = local_stats(patterns.constant(16, 16, 0.3), patterns.constant(16, 16, 0.7), KERNEL)
    np.testing.assert_allclose(mse.local_mse(st), 0.16, atol=1e-15)


def test_identity_against_brute_force_patches(rng):
    for _ in range(20):
        a, b = rng.random((11, 11)), rng.random((11, 11))
        direct = math.fsum((W * (a - b) ** 2).ravel())
        got = mse.local_mse(local_stats(a, b, KERNEL))[0, 0]
        assert abs(got - direct) < 1e-12


def test_identity_residual_random_pairs(rng):
    for _ in range(10):
        assert mse.identity_residual(rng.random((30, 30)), rng.random((30, 30)), KERNEL) < 1e-12


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (12, 12), elements=st.floats(0, 1)),
       arrays(np.float64, (12, 12), elements=st.floats(0, 1)))
def test_local_mse_nonnegative_and_zero_only_for_equal_windows(a, b):
    lm = mse.local_mse(local_stats(a, b, KERNEL))
    assert np.all(lm >= -1e-15)
    if np.array_equal(a, b):
        assert np.all(lm == 0)


def test_ssim_star_identical_textured(rng):
    a = rng.random((24, 24))
    star = mse.ssim_star(local_stats(a, a, KERNEL))
    assert np.all(star.ssim_map == 1.0)
    assert not star.undefined_mask.any()


def test_ssim_star_distinct_constants_flags_degenerate_factor():
    st = local_stats(patterns.constant(16, 16, 0.2), patterns.constant(16, 16, 0.6), KERNEL)
    star = mse.ssim_star(st)
    assert star.degenerate_mask.all()
    np.testing.assert_allclose(star.ssim_map, 2 * 0.2 * 0.6 / (0.04 + 0.36), rtol=1e-12)


def test_ssim_star_black_vs_black_and_texture():
    st = local_stats(patterns.constant(16, 16, 0.0), patterns.checkerboard(16, 16, 0, 0.5), KERNEL)
    star = mse.ssim_star(st)
    # first factor 0 / nonzero, second factor 0 / nonzero: defined zeros
    assert not star.undefined_mask.any()
    assert np.all(star.ssim_map == 0)


def test_ssim_star_close_to_ssim_for_mild_distortions():
    rng = np.random.default_rng(1)
    for sigma in (0.005, 0.01):
        for _ in range(3):
            a = mse.smooth_field(64, rng, sigma=1.5, lo=0.0, hi=1.0)
            b = np.clip(a + sigma * rng.standard_normal(a.shape), 0, 1)
            st = local_stats(a, b, KERNEL)
            keep = (st.var_a > 0.01) & (st.var_b > 0.01)
            assert keep.any()
            gap = np.abs(mse.ssim_star(st).ssim_map - ssim_maps(a, b).ssim_map)[keep]
            assert gap.max() < 1e-3


def test_constants_converge_to_ssim_star(rng):
    a = mse.smooth_field(48, rng, sigma=2.0)
    b = np.clip(a + 0.05 * rng.standard_normal(a.shape), 0, 1)
    st = local_stats(a, b, KERNEL)
    p = SsimParams()
    star = mse.ssim_star(st).ssim_map
    gaps = [np.max(np.abs(mse.ssim_with_constants(st, p.C1 * k, p.C2 * k) - star))
            for k in (1.0, 1e-2, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2]
    np.testing.assert_allclose(mse.ssim_with_constants(st, p.C1, p.C2),
                               ssim_maps(a, b).ssim_map, atol=1e-12)


def test_correlate_exact_quadratic():
    s = np.linspace(0.1, 0.9, 20)
    x = 1 - s
    e = 0.3 * x ** 2 + 0.2 * x + 0.01
    rep = mse.correlate(s, e)
    assert rep.r_squared == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(rep.coefficients, [0.3, 0.2, 0.01], atol=1e-9)
    assert rep.n == 20


def test_correlate_exact_linear_fit_too():
    s = np.linspace(0, 1, 11)
    rep = mse.correlate(s, 2 * (1 - s))
    assert rep.r_squared == pytest.approx(1.0, abs=1e-9)
    assert rep.linear_r_squared == pytest.approx(1.0, abs=1e-9)


def test_correlate_drops_nan_and_needs_three_points():
    rep = mse.correlate([0.1, np.nan, 0.5, 0.9], [0.8, 0.3, 0.25, 0.01])
    assert rep.n == 3
    with pytest.raises(ValueError):
        mse.correlate([0.1, 0.2], [0.3, 0.4])
    with pytest.raises(ValueError):
        mse.correlate([0.1, 0.2, 0.3], [0.3, 0.4])


def test_r_squared_in_unit_interval(rng):
    r2, _ = mse.r_squared(rng.random(50), rng.random(50), 1)
    assert 0.0 <= r2 <= 1.0


def test_luminance_sweep_pairs_fit_well():
    s, e = [], []
    for v in patterns.sweep_values(64):
        st = local_stats(patterns.constant(11, 11, 1.0), patterns.constant(11, 11, v), KERNEL)
        s.append(mse.ssim_star(st).ssim_map[0, 0])
        e.append(mse.local_mse(st)[0, 0])
    assert mse.correlate(s, e).r_squared >= 0.99


def test_corpus_shape_and_determinism():
    c1, c2 = mse.distortion_corpus(), mse.distortion_corpus()
    assert len(c1) >= 20
    assert all(np.array_equal(p.b, q.b) for p, q in zip(c1, c2))
    assert all(p.a.min() >= 0 and p.b.max() <= 1 for p in c1)


def test_corpus_per_reference_r_squared():
    corr = mse.corpus_correlation()
    assert len(corr.per_reference) == len(mse.CORPUS_TEXTURE_SCALES)
    assert corr.min_reference_r_squared >= 0.9
    d = corr.to_dict()
    assert 0 <= d["pooled"]["r_squared"] <= 1 and 0 <= d["local"]["r_squared"] <= 1


def test_mse_and_psnr():
    a, b = patterns.constant(8, 8, 0.0), patterns.constant(8, 8, 0.5)
    assert mse.mse(a, b) == 0.25
    assert mse.psnr(a, b) == pytest.approx(10 * math.log10(4), abs=1e-12)
    assert mse.psnr(a, b) == pytest.approx(6.0206, abs=1e-4)
    assert mse.psnr(a * 255, b * 255, 255.0) == pytest.approx(6.0206, abs=1e-4)


def test_psnr_identical_is_infinite():
    a = patterns.gradient(8, 8)
    assert mse.psnr(a, a) == math.inf


def test_mse_dimension_mismatch():
    with pytest.raises(ValueError):
        mse.mse(np.zeros((3, 3)), np.zeros((3, 4)))


def test_psnr_linear_in_ssim_star():
    r2, n = mse.psnr_linearity()
    assert n >= 3 and r2 >= 0.9


def test_psnr_linearity_rejects_empty_window():
    series = [("same", np.full((16, 16), 0.5), np.full((16, 16), 0.5))] * 3
    with pytest.raises(ValueError):
        mse.psnr_linearity(series)


def test_gaussian_blur_preserves_constants_and_shape(rng):
    img = np.full((20, 17), 0.4)
    np.testing.assert_allclose(mse.gaussian_blur(img, 1.3), 0.4, atol=1e-15)
    noisy = rng.random((20, 17))
    out = mse.gaussian_blur(noisy, 1.0)
    assert out.shape == noisy.shape and out.std() < noisy.std()
    assert np.array_equal(mse.gaussian_blur(noisy, 0), noisy)
