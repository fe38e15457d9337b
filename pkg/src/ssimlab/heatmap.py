"""Render SSIM-style maps as RGB images.

Values in [0, 1] become gray levels (0 black, 1 white). Negative values run
linearly from green just below 0 to red at -1. Undefined pixels are pure
blue, which neither ramp can produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GREEN = (0.0, 1.0, 0.0)
RED = (1.0, 0.0, 0.0)
UNDEFINED_COLOR = (0.0, 0.0, 1.0)

# slack for values that overshoot [-1, 1] by rounding
_RANGE_SLACK = 1e-9

LEGEND = {
    "positive": {"range": [0.0, 1.0], "rule": "gray (v, v, v)"},
    "negative": {"range": [-1.0, 0.0], "rule": "linear RGB from green at 0- to red at -1",
                 "anchors": {"-1": list(RED), "0-": list(GREEN)}},
    "undefined": {"color": list(UNDEFINED_COLOR)},
}


@dataclass
class Heatmap:
    rgb: np.ndarray = field(repr=False)
    legend: dict = field(default_factory=lambda: dict(LEGEND))

    @property
    def width(self) -> int:
        return self.rgb.shape[1]

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    def to_uint8(self) -> np.ndarray:
        return np.floor(self.rgb * 255.0 + 0.5).astype(np.uint8)


def render(values, mask=None) -> Heatmap:
    """Map a 2D array of values in [-1, 1] to colors.

    ``mask`` flags undefined pixels; NaN values are treated as undefined too.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ValueError("render expects a 2D map")
    undefined = np.isnan(v)
    if mask is not None:
        undefined = undefined | np.asarray(mask, dtype=bool)
    defined = v[~undefined]
    if defined.size and (np.isinf(defined).any() or defined.min() < -1 - _RANGE_SLACK
                         or defined.max() > 1 + _RANGE_SLACK):
        raise ValueError("map values must lie in [-1, 1] where defined")
    v = np.clip(np.where(undefined, 0.0, v), -1.0, 1.0)

    rgb = np.empty(v.shape + (3,))
    pos = v >= 0
    rgb[pos] = v[pos, None]
    t = -v[~pos]
    rgb[~pos] = (1 - t)[:, None] * np.array(GREEN) + t[:, None] * np.array(RED)
    rgb[undefined] = UNDEFINED_COLOR
    return Heatmap(rgb)


def gray_level_to_value(level: int) -> float:
    """Invert the achromatic branch of an 8-bit rendering."""
    return level / 255.0
