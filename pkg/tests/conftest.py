import numpy as np
import pytest

from ssimlab import SsimParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def params():
    return SsimParams()


def weighted_patch_stats(pa, pb, w):
    """Two-pass weighted moments of one patch, independent of the library path."""
    w = w.ravel()
    pa = pa.ravel()
    pb = pb.ravel()
    mu_a = np.sum(w * pa) / np.sum(w)
    mu_b = np.sum(w * pb) / np.sum(w)
    var_a = np.sum(w * (pa - mu_a) ** 2) / np.sum(w)
    var_b = np.sum(w * (pb - mu_b) ** 2) / np.sum(w)
    cov = np.sum(w * (pa - mu_a) * (pb - mu_b)) / np.sum(w)
    return mu_a, mu_b, var_a, var_b, cov
