"""Pure numpy window moments, used when the compiled kernel is unavailable."""

import numpy as np


def window_moments(a: np.ndarray, b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted sums of a, b, a*a, b*b, a*b over every fully interior window.

    Returns an array of shape ``(5, H - k + 1, W - k + 1)``. The loop walks
    kernel offsets in row-major order and adds one shifted slab per offset,
    matching the per-pixel accumulation order of the compiled kernel.
    """
    k = w.shape[0]
    out_h = a.shape[0] - k + 1
    out_w = a.shape[1] - k + 1
    fields = np.stack([a, b, a * a, b * b, a * b])
    acc = np.zeros((5, out_h, out_w), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            acc += w[i, j] * fields[:, i:i + out_h, j:j + out_w]
    return acc
