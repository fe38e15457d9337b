"""Gaussian-windowed local statistics and the SSIM component maps.

Images are 2D float64 arrays with samples in ``[0, L]``. Only fully interior
window positions are evaluated, so every map is cropped by
``window_size // 2`` pixels on each side.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import _backend

UNDEFINED_POLICIES = ("flag-and-nan", "signed-magnitude", "reject")
KERNEL_KINDS = ("gaussian", "uniform")

# one-pass variance cannot resolve anything below this fraction of E[p^2]
_CANCELLATION_FLOOR = 64 * np.finfo(np.float64).eps


class UndefinedResultError(ValueError):
    """Raised by the ``reject`` policy when some pixels have no real SSIM value."""

    def __init__(self, count: int, first: tuple[int, int]):
        self.count = count
        self.first = first
        super().__init__(
            f"{count} pixel(s) raise a negative component to a non-integer "
            f"exponent; first at (x={first[0]}, y={first[1]})"
        )


def is_integer_exponent(e: float) -> bool:
    return abs(e - round(e)) <= 1e-9


@dataclass(frozen=True)
class SsimParams:
    """Constants, exponents and window settings for one SSIM evaluation.

    ``C1``, ``C2`` and ``C3`` are derived on access. Passing ``c3`` overrides
    the default ``C3 = C2 / 2`` rule.
    """

    K1: float = 0.01
    K2: float = 0.03
    L: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    window_size: int = 11
    sigma: float = 1.5
    c3: Optional[float] = None
    undefined_policy: str = "flag-and-nan"
    kernel: str = "gaussian"

    def __post_init__(self):
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ValueError(f"window_size must be odd and >= 1, got {self.window_size}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.K1 < 0 or self.K2 < 0:
            raise ValueError("K1 and K2 must be non-negative")
        if not self.L > 0:
            raise ValueError(f"dynamic range L must be positive, got {self.L}")
        if self.c3 is not None and self.c3 < 0:
            raise ValueError("C3 override must be non-negative")
        if self.undefined_policy not in UNDEFINED_POLICIES:
            raise ValueError(f"undefined_policy must be one of {UNDEFINED_POLICIES}")
        if self.kernel not in KERNEL_KINDS:
            raise ValueError(f"kernel must be one of {KERNEL_KINDS}")

    @classmethod
    def eight_bit(cls, **kw) -> "SsimParams":
        return cls(L=255.0, **kw)

    @property
    def C1(self) -> float:
        return (self.K1 * self.L) ** 2

    @property
    def C2(self) -> float:
        return (self.K2 * self.L) ** 2

    @property
    def C3(self) -> float:
        return self.C2 / 2 if self.c3 is None else self.c3

    @property
    def unit_exponents(self) -> bool:
        return self.alpha == 1 and self.beta == 1 and self.gamma == 1

    @property
    def simplified_applies(self) -> bool:
        """True when the single-fraction form equals the full product."""
        return self.unit_exponents and self.c3 is None

    def make_kernel(self) -> "Kernel":
        if self.kernel == "uniform":
            return uniform_kernel(self.window_size)
        return gaussian_kernel(self.window_size, self.sigma)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(C1=self.C1, C2=self.C2, C3=self.C3)
        return d


@dataclass(frozen=True)
class Kernel:
    size: int
    weights: np.ndarray = field(repr=False)


def gaussian_kernel(size: int, sigma: float) -> Kernel:
    """Sampled isotropic Gaussian on integer offsets, normalized to sum 1."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and >= 1, got {size}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    r = np.arange(size, dtype=np.float64) - size // 2
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2.0 * sigma * sigma))
    return Kernel(size, g / g.sum())


def uniform_kernel(size: int) -> Kernel:
    """Box kernel; makes local statistics plain unweighted window moments."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and >= 1, got {size}")
    return Kernel(size, np.full((size, size), 1.0 / (size * size)))


def as_gray(image, L: float = 1.0) -> np.ndarray:
    """Validate an image and return it as a C-contiguous float64 array.

    ``uint8`` input is rescaled by ``v / 255 * L``; float input must already
    lie in ``[0, L]``.
    """
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D grayscale image, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        arr = arr.astype(np.float64) / 255.0 * L
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains NaN or infinite samples")
    if arr.size and (arr.min() < 0 or arr.max() > L):
        raise ValueError(f"image samples must lie in [0, {L:g}]")
    return arr


@dataclass
class LocalStats:
    """Per-pixel weighted moments on the valid (border-cropped) grid."""

    mu_a: np.ndarray
    mu_b: np.ndarray
    var_a: np.ndarray
    var_b: np.ndarray
    cov: np.ndarray

    @property
    def valid_height(self) -> int:
        return self.mu_a.shape[0]

    @property
    def valid_width(self) -> int:
        return self.mu_a.shape[1]


def local_stats(a, b, kernel: Kernel) -> LocalStats:
    """Weighted means, variances and covariance in every interior window.

    Variances use ``E[p^2] - mu^2``. Results at or below the cancellation floor
    of that formula are set to exactly 0, and the covariance is zeroed wherever
    either variance is, so constant windows give exact zeros.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")
    if a.ndim != 2:
        raise ValueError("local_stats expects 2D images")
    if min(a.shape) < kernel.size:
        raise ValueError(
            f"image {a.shape[1]}x{a.shape[0]} is smaller than the "
            f"{kernel.size}x{kernel.size} window"
        )
    w = np.ascontiguousarray(kernel.weights, dtype=np.float64)
    m = _backend.window_moments(a, b, w)
    mu_a, mu_b, e_aa, e_bb, e_ab = m
    var_a = _snap_variance(e_aa - mu_a * mu_a, e_aa)
    var_b = _snap_variance(e_bb - mu_b * mu_b, e_bb)
    cov = e_ab - mu_a * mu_b
    cov = np.where((var_a == 0) | (var_b == 0), 0.0, cov)
    return LocalStats(mu_a, mu_b, var_a, var_b, cov)


def _snap_variance(var: np.ndarray, second_moment: np.ndarray) -> np.ndarray:
    return np.where(var <= _CANCELLATION_FLOOR * second_moment, 0.0, var)


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num/den with 0/0 -> 1 and nonzero/0 -> NaN."""
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    zero = den == 0
    if not zero.any():
        return num / den
    out = np.empty(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=~zero)
    out[zero & (num == 0)] = 1.0
    out[zero & (num != 0)] = np.nan
    return out


def luminance_component(stats: LocalStats, params: SsimParams) -> np.ndarray:
    ma, mb = stats.mu_a, stats.mu_b
    return _ratio(2 * ma * mb + params.C1, ma * ma + mb * mb + params.C1)


def contrast_component(stats: LocalStats, params: SsimParams) -> np.ndarray:
    sa, sb = np.sqrt(stats.var_a), np.sqrt(stats.var_b)
    return _ratio(2 * sa * sb + params.C2, stats.var_a + stats.var_b + params.C2)


def structure_component(stats: LocalStats, params: SsimParams) -> np.ndarray:
    sa, sb = np.sqrt(stats.var_a), np.sqrt(stats.var_b)
    return _ratio(stats.cov + params.C3, sa * sb + params.C3)


@dataclass
class SsimMaps:
    """Component maps, combined SSIM map and the undefined-pixel mask.

    ``undefined_mask`` flags every pixel where a component had no real power
    (or an unresolvable division by zero). Under ``flag-and-nan`` those
    pixels hold NaN in ``ssim_map`` and are left out of pooling; under
    ``signed-magnitude`` they hold ``sign(s) * |s|**gamma`` and are pooled.
    """

    l_map: np.ndarray
    c_map: np.ndarray
    s_map: np.ndarray
    ssim_map: np.ndarray
    undefined_mask: np.ndarray

    @property
    def mssim(self) -> float:
        return pool_mssim(self)[0]

    @property
    def defined_count(self) -> int:
        return int(np.isfinite(self.ssim_map).sum())

    @property
    def undefined_count(self) -> int:
        return int(self.undefined_mask.sum())


def _first_xy(mask: np.ndarray) -> tuple[int, int]:
    y, x = np.argwhere(mask)[0]
    return int(x), int(y)


def _power(m: np.ndarray, e: float, policy: str):
    """Raise a component map to ``e``; returns (values, hazard mask)."""
    nan = np.isnan(m)
    if e == 1:
        return m, nan
    if is_integer_exponent(e):
        return np.power(m, float(round(e))), nan
    neg = m < 0
    if policy == "signed-magnitude":
        out = np.sign(m) * np.power(np.abs(m), e)
    else:
        out = np.power(np.where(neg, np.nan, m), e)
    return out, neg | nan


def ssim_full(l_map, c_map, s_map, params: SsimParams) -> SsimMaps:
    """Per-pixel ``l**alpha * c**beta * s**gamma`` with undefined handling."""
    l_map, c_map, s_map = (np.asarray(m, dtype=np.float64) for m in (l_map, c_map, s_map))
    if not (l_map.shape == c_map.shape == s_map.shape):
        raise ValueError("component maps must share dimensions")
    policy = params.undefined_policy
    lp, hl = _power(l_map, params.alpha, policy)
    cp, hc = _power(c_map, params.beta, policy)
    sp, hs = _power(s_map, params.gamma, policy)
    undefined = hl | hc | hs
    if undefined.any() and policy == "reject":
        raise UndefinedResultError(int(undefined.sum()), _first_xy(undefined))
    ssim_map = lp * cp * sp
    if policy == "flag-and-nan":
        ssim_map = np.where(undefined, np.nan, ssim_map)
    return SsimMaps(l_map, c_map, s_map, ssim_map, undefined)


def ssim_simplified(stats: LocalStats, params: SsimParams) -> SsimMaps:
    """Single-fraction SSIM (unit exponents, ``C3 = C2/2``) plus component maps."""
    ma, mb = stats.mu_a, stats.mu_b
    n1 = 2 * ma * mb + params.C1
    d1 = ma * ma + mb * mb + params.C1
    n2 = 2 * stats.cov + params.C2
    d2 = stats.var_a + stats.var_b + params.C2
    den = d1 * d2
    if np.all(den > 0):
        ssim_map = (n1 * n2) / den
    else:
        ssim_map = _ratio(n1, d1) * _ratio(n2, d2)
    l_map = luminance_component(stats, params)
    c_map = contrast_component(stats, params)
    s_map = structure_component(stats, params)
    undefined = np.isnan(ssim_map)
    if undefined.any() and params.undefined_policy == "reject":
        raise UndefinedResultError(int(undefined.sum()), _first_xy(undefined))
    return SsimMaps(l_map, c_map, s_map, ssim_map, undefined)


def pool_mssim(maps: SsimMaps) -> tuple[float, int]:
    """Mean of the SSIM map over defined pixels, with the defined-pixel count."""
    defined = np.isfinite(maps.ssim_map)
    n = int(defined.sum())
    if n == 0:
        raise ValueError("every pixel of the SSIM map is undefined; nothing to pool")
    return float(maps.ssim_map[defined].mean()), n


def ssim_maps(a, b, params: SsimParams = SsimParams()) -> SsimMaps:
    a = as_gray(a, params.L)
    b = as_gray(b, params.L)
    stats = local_stats(a, b, params.make_kernel())
    if params.simplified_applies:
        return ssim_simplified(stats, params)
    l_map = luminance_component(stats, params)
    c_map = contrast_component(stats, params)
    s_map = structure_component(stats, params)
    return ssim_full(l_map, c_map, s_map, params)


@dataclass
class ComparisonReport:
    mssim: float
    mean_l: float
    mean_c: float
    mean_s: float
    defined_count: int
    undefined_count: int
    undefined_fraction: float
    params: SsimParams
    maps: SsimMaps = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "mssim": self.mssim,
            "mean_l": self.mean_l,
            "mean_c": self.mean_c,
            "mean_s": self.mean_s,
            "valid_width": int(self.maps.ssim_map.shape[1]),
            "valid_height": int(self.maps.ssim_map.shape[0]),
            "defined_count": self.defined_count,
            "undefined_count": self.undefined_count,
            "undefined_fraction": self.undefined_fraction,
            "params": self.params.to_dict(),
        }


def _nanmean(m: np.ndarray) -> float:
    finite = np.isfinite(m)
    return float(m[finite].mean()) if finite.any() else math.nan


def compare(a, b, params: SsimParams = SsimParams()) -> ComparisonReport:
    """Run the whole pipeline on two equally sized grayscale images."""
    maps = ssim_maps(a, b, params)
    mssim, n = pool_mssim(maps)
    undefined = maps.undefined_count
    return ComparisonReport(
        mssim=mssim,
        mean_l=_nanmean(maps.l_map),
        mean_c=_nanmean(maps.c_map),
        mean_s=_nanmean(maps.s_map),
        defined_count=n,
        undefined_count=undefined,
        undefined_fraction=undefined / maps.ssim_map.size,
        params=params,
        maps=maps,
    )


def mssim(a, b, params: SsimParams = SsimParams()) -> float:
    return pool_mssim(ssim_maps(a, b, params))[0]
