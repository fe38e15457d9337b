import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ssimlab import gaussian_kernel, local_stats, uniform_kernel
from ssimlab import patterns

from conftest import weighted_patch_stats

KERNEL = gaussian_kernel(11, 1.5)

unit_images = arrays(np.float64, (14, 15),
                     elements=st.floats(0, 1, allow_nan=False, allow_infinity=False))


def test_constant_fields_have_zero_spread():
    a = patterns.constant(20, 16, 0.3)
    b = patterns.constant(20, 16, 0.7)
    s = local_stats(a, b, KERNEL)
    np.testing.assert_allclose(s.mu_a, 0.3, atol=1e-15)
    np.testing.assert_allclose(s.mu_b, 0.7, atol=1e-15)
    assert np.all(s.var_a == 0) and np.all(s.var_b == 0) and np.all(s.cov == 0)


def test_valid_grid_size():
    a = np.zeros((30, 40))
    s = local_stats(a, a, KERNEL)
    assert (s.valid_height, s.valid_width) == (20, 30)


def test_self_comparison_gives_equal_moments(rng):
    a = rng.random((24, 24))
    s = local_stats(a, a, KERNEL)
    np.testing.assert_array_equal(s.var_a, s.var_b)
    np.testing.assert_array_equal(s.var_a, s.cov)
    np.testing.assert_array_equal(s.mu_a, s.mu_b)


def test_checkerboard_with_box_kernel_matches_direct_summation():
    cb = patterns.checkerboard(16, 16, 0.0, 1.0)
    s = local_stats(cb, cb, uniform_kernel(11))
    # an 11x11 window holds 61 pixels of its corner color and 60 of the other
    for y in range(s.valid_height):
        for x in range(s.valid_width):
            patch = cb[y:y + 11, x:x + 11]
            assert s.mu_a[y, x] == pytest.approx(patch.mean(), abs=1e-15)
            assert s.var_a[y, x] == pytest.approx(patch.var(), abs=1e-15)
    assert set(np.round(s.mu_a.ravel() * 121).astype(int)) == {60, 61}
    np.testing.assert_allclose(s.var_a, 61 * 60 / 121 ** 2, atol=1e-15)
    np.testing.assert_allclose(s.var_a, 0.25, atol=2e-5)


def test_one_pass_variance_matches_two_pass(rng):
    w = KERNEL.weights
    for _ in range(20):
        a, b = rng.random((11, 11)), rng.random((11, 11))
        s = local_stats(a, b, KERNEL)
        mu_a, mu_b, var_a, var_b, cov = weighted_patch_stats(a, b, w)
        assert abs(s.mu_a[0, 0] - mu_a) < 1e-12
        assert abs(s.var_a[0, 0] - var_a) < 1e-10
        assert abs(s.var_b[0, 0] - var_b) < 1e-10
        assert abs(s.cov[0, 0] - cov) < 1e-10


@settings(max_examples=60, deadline=None)
@given(unit_images, unit_images)
def test_cauchy_schwarz_and_nonnegative_variance(a, b):
    s = local_stats(a, b, KERNEL)
    assert np.all(s.var_a >= 0) and np.all(s.var_b >= 0)
    assert np.all(np.abs(s.cov) <= np.sqrt(s.var_a * s.var_b) + 1e-9)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="differ"):
        local_stats(np.zeros((16, 16)), np.zeros((16, 17)), KERNEL)


def test_image_smaller_than_window_rejected():
    with pytest.raises(ValueError, match="smaller"):
        local_stats(np.zeros((10, 30)), np.zeros((10, 30)), KERNEL)
