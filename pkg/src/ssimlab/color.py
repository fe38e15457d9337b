"""Color-to-grayscale reductions, channel-weighted YCbCr SSIM and a probe
for colors that a grayscale comparison cannot tell apart from white.

RGB images are ``(h, w, 3)`` arrays, sRGB-encoded, with channels in
``[0, 1]`` (``uint8`` is accepted and divided by 255). No linearization is
applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SsimParams, compare

GRAY_COEFFICIENTS = {
    # green weight as printed in the source analysis
    "paper": (0.2989, 0.5810, 0.1140),
    "rec601": (0.2989, 0.5870, 0.1140),
    # exact weights behind Matlab's rgb2gray (rows of inv(YIQ) scaled)
    "matlab": (0.298936021293775, 0.587043074451121, 0.114020904255103),
}

YCBCR_WEIGHTS = (0.8, 0.1, 0.1)


class UnreachableTarget(ValueError):
    pass


def as_rgb(image) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) RGB image, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr.astype(np.float64) / 255.0
    arr = arr.astype(np.float64)
    if not np.all(np.isfinite(arr)) or arr.min() < 0 or arr.max() > 1:
        raise ValueError("RGB channels must be finite and lie in [0, 1]")
    return arr


def quantize8(x: np.ndarray) -> np.ndarray:
    """Round to the nearest 1/255 step, halves going up."""
    return np.floor(np.asarray(x, dtype=np.float64) * 255.0 + 0.5) / 255.0


def _coeffs(coeffs) -> tuple[float, float, float]:
    if isinstance(coeffs, str):
        try:
            return GRAY_COEFFICIENTS[coeffs]
        except KeyError:
            raise ValueError(f"unknown coefficient set {coeffs!r}; "
                             f"choose from {sorted(GRAY_COEFFICIENTS)}") from None
    cr, cg, cb = (float(c) for c in coeffs)
    if min(cr, cg, cb) < 0:
        raise ValueError("grayscale coefficients must be non-negative")
    return cr, cg, cb


def rgb_to_gray(img, coeffs="rec601", quantize: bool = False) -> np.ndarray:
    """Weighted channel sum ``cr*r + cg*g + cb*b``.

    With ``quantize`` the input channels and the output are both snapped to
    8-bit levels, as happens when 8-bit files go through an 8-bit
    conversion routine. The result is clipped to ``[0, 1]``.
    """
    rgb = as_rgb(img)
    cr, cg, cb = _coeffs(coeffs)
    if quantize:
        rgb = quantize8(rgb)
    y = cr * rgb[..., 0] + cg * rgb[..., 1] + cb * rgb[..., 2]
    if quantize:
        y = quantize8(y)
    return np.clip(y, 0.0, 1.0)


def rgb_to_ycbcr(img) -> np.ndarray:
    """Full-range BT.601 YCbCr with chroma offset to be centered on 0.5."""
    rgb = as_rgb(img)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 0.5 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 0.5 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return np.clip(np.stack([y, cr, cb], axis=-1), 0.0, 1.0)


@dataclass(frozen=True)
class YcbcrResult:
    value: float
    mssim_y: float
    mssim_cr: float
    mssim_cb: float

    def to_dict(self) -> dict:
        return {"weighted": self.value, "mssim_y": self.mssim_y,
                "mssim_cr": self.mssim_cr, "mssim_cb": self.mssim_cb}


def weighted_ycbcr_ssim(a, b, params: SsimParams = SsimParams()) -> YcbcrResult:
    """``0.8 * MSSIM_Y + 0.1 * MSSIM_Cr + 0.1 * MSSIM_Cb``."""
    ya, yb = rgb_to_ycbcr(a), rgb_to_ycbcr(b)
    if ya.shape != yb.shape:
        raise ValueError(f"image dimensions differ: {ya.shape[:2]} vs {yb.shape[:2]}")
    scores = [compare(ya[..., i] * params.L, yb[..., i] * params.L, params).mssim
              for i in range(3)]
    value = sum(w * s for w, s in zip(YCBCR_WEIGHTS, scores))
    return YcbcrResult(value, *scores)


def constant_rgb(w: int, h: int, color) -> np.ndarray:
    return np.broadcast_to(np.asarray(color, dtype=np.float64), (h, w, 3)).copy()


def gray_path_mssim(a, b, coeffs="rec601", quantize: bool = True,
                    params: SsimParams = SsimParams()) -> float:
    ga = rgb_to_gray(a, coeffs, quantize) * params.L
    gb = rgb_to_gray(b, coeffs, quantize) * params.L
    return compare(ga, gb, params).mssim


@dataclass(frozen=True)
class ProbeResult:
    channel: str
    color: tuple[float, float, float]
    mssim: float
    iterations: int


_CHANNELS = {"r": 0, "g": 1, "b": 2}


def equiluminant_probe(channel: str, target_mssim: float, coeffs="rec601",
                       quantize: bool = False, size: int = 16,
                       tol: float = 5e-4) -> ProbeResult:
    """Lower one channel of white until the grayscale MSSIM against white
    reaches ``target_mssim``.

    Bisects on the channel value; MSSIM grows monotonically with it. Raises
    ``UnreachableTarget`` when the target is not attained for any channel
    value below 1.
    """
    if channel not in _CHANNELS:
        raise ValueError(f"channel must be one of 'r', 'g', 'b', got {channel!r}")
    idx = _CHANNELS[channel]
    white = constant_rgb(size, size, (1.0, 1.0, 1.0))

    def score(v: float) -> tuple[tuple[float, float, float], float]:
        color = [1.0, 1.0, 1.0]
        color[idx] = v
        return tuple(color), gray_path_mssim(white, constant_rgb(size, size, color),
                                             coeffs, quantize)

    if not 0.0 < target_mssim < 1.0:
        raise UnreachableTarget(f"target {target_mssim} is outside (0, 1); "
                                "identical gray values are needed to reach 1")
    _, floor = score(0.0)
    if target_mssim < floor - tol:
        raise UnreachableTarget(
            f"zeroing channel {channel} only lowers MSSIM to {floor:.5f}; "
            f"target {target_mssim} is out of reach")
    lo, hi = 0.0, 1.0
    for it in range(1, 64):
        mid = 0.5 * (lo + hi)
        color, m = score(mid)
        if abs(m - target_mssim) < tol:
            return ProbeResult(channel, color, m, it)
        if m < target_mssim:
            lo = mid
        else:
            hi = mid
    raise UnreachableTarget(f"bisection did not reach {target_mssim} within {tol}")
