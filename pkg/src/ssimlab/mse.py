"""Local MSE on the SSIM footprint, constant-free SSIM, PSNR and R^2 fits.

The key identity is that the Gaussian-weighted mean of ``(a - b)^2`` in a
window equals ``varA + varB - 2 cov + (muA - muB)^2`` of the same window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import patterns
from .core import LocalStats, SsimParams, _ratio, as_gray, local_stats

ZERO_CONSTANTS = SsimParams(K1=0.0, K2=0.0)


def local_mse(stats: LocalStats) -> np.ndarray:
    d = stats.mu_a - stats.mu_b
    return stats.var_a + stats.var_b - 2.0 * stats.cov + d * d


@dataclass
class SsimStar:
    """Constant-free single-fraction SSIM.

    ``degenerate_mask`` marks pixels where a factor was 0/0 (evaluated as
    1); ``undefined_mask`` marks nonzero/0 pixels, which hold NaN.
    """

    ssim_map: np.ndarray
    undefined_mask: np.ndarray
    degenerate_mask: np.ndarray


def ssim_star(stats: LocalStats) -> SsimStar:
    ma, mb = stats.mu_a, stats.mu_b
    n1, d1 = 2 * ma * mb, ma * ma + mb * mb
    n2, d2 = 2 * stats.cov, stats.var_a + stats.var_b
    m = _ratio(n1, d1) * _ratio(n2, d2)
    degenerate = ((d1 == 0) & (n1 == 0)) | ((d2 == 0) & (n2 == 0))
    return SsimStar(m, np.isnan(m), degenerate)


def ssim_with_constants(stats: LocalStats, C1: float, C2: float) -> np.ndarray:
    """Single-fraction SSIM with explicit constants (for convergence checks)."""
    ma, mb = stats.mu_a, stats.mu_b
    return (_ratio(2 * ma * mb + C1, ma * ma + mb * mb + C1)
            * _ratio(2 * stats.cov + C2, stats.var_a + stats.var_b + C2))


@dataclass
class CorrelationReport:
    """Fit of MSE* against ``1 - SSIM*``.

    ``r_squared`` belongs to the quadratic model; ``linear_r_squared`` to a
    straight line through the same points. Coefficients are highest power
    first, as returned by ``numpy.polyfit``.
    """

    r_squared: float
    linear_r_squared: float
    n: int
    coefficients: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"r_squared": self.r_squared, "linear_r_squared": self.linear_r_squared,
                "n": self.n, "coefficients": list(self.coefficients)}


def r_squared(x: np.ndarray, y: np.ndarray, degree: int) -> tuple[float, np.ndarray]:
    coef = np.polyfit(x, y, degree)
    resid = y - np.polyval(coef, x)
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    if ss_tot == 0:
        return (1.0 if ss_res == 0 else 0.0), coef
    return float(min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)), coef


def correlate(ssim_star_values, mse_star_values) -> CorrelationReport:
    s = np.asarray(ssim_star_values, dtype=np.float64).ravel()
    e = np.asarray(mse_star_values, dtype=np.float64).ravel()
    if s.shape != e.shape:
        raise ValueError("sample arrays differ in length")
    ok = np.isfinite(s) & np.isfinite(e)
    s, e = s[ok], e[ok]
    if s.size < 3:
        raise ValueError(f"need at least 3 defined sample pairs, got {s.size}")
    x = 1.0 - s
    r2, coef = r_squared(x, e, 2)
    r2_lin, _ = r_squared(x, e, 1)
    return CorrelationReport(r2, r2_lin, int(s.size), [float(c) for c in coef])


def mse(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.mean(d * d))


def psnr(a, b, L: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical images."""
    e = mse(a, b)
    if e == 0:
        return math.inf
    return 10.0 * math.log10(L * L / e)


def identity_residual(a, b, kernel) -> float:
    """Largest gap between the moment identity and direct weighted ``(a-b)^2``."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    stats = local_stats(a, b, kernel)
    d = a - b
    direct = local_stats(d * d, d * d, kernel).mu_a
    return float(np.max(np.abs(local_mse(stats) - direct)))


@dataclass
class PairSummary:
    name: str
    ssim_star: float
    mse_star: float
    psnr: float
    mean_gap: float
    local_ssim_star: np.ndarray = field(repr=False)
    local_mse_star: np.ndarray = field(repr=False)


def summarize_pair(name: str, a, b, params: SsimParams = SsimParams()) -> PairSummary:
    """Pooled SSIM*, pooled MSE* and PSNR for one pair, keeping the local maps."""
    a = as_gray(a, params.L)
    b = as_gray(b, params.L)
    stats = local_stats(a, b, params.make_kernel())
    star = ssim_star(stats).ssim_map
    lm = local_mse(stats)
    finite = np.isfinite(star)
    pooled = float(star[finite].mean()) if finite.any() else math.nan
    return PairSummary(name, pooled, float(lm.mean()), psnr(a, b, params.L),
                       abs(float(a.mean() - b.mean())), star, lm)


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with reflected borders; output keeps the input size."""
    if sigma <= 0:
        return np.array(img, dtype=np.float64)
    r = max(1, int(math.ceil(3 * sigma)))
    t = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-t * t / (2 * sigma * sigma))
    g /= g.sum()
    out = np.pad(np.asarray(img, dtype=np.float64), r, mode="reflect")
    out = np.lib.stride_tricks.sliding_window_view(out, 2 * r + 1, axis=0) @ g
    out = np.lib.stride_tricks.sliding_window_view(out, 2 * r + 1, axis=1) @ g
    return out


def smooth_field(size: int, rng: np.random.Generator, sigma: float = 4.0,
                 lo: float = 0.2, hi: float = 0.8) -> np.ndarray:
    """Blurred white noise stretched to ``[lo, hi]``."""
    f = gaussian_blur(rng.standard_normal((size, size)), sigma)
    f = (f - f.min()) / (f.max() - f.min())
    return lo + (hi - lo) * f


CORPUS_NOISE = (0.005, 0.01, 0.015, 0.02, 0.03)
CORPUS_BLUR = (0.5, 1.0, 1.5, 2.0)
CORPUS_DITHER = (2, 4, 6, 8)
CORPUS_TEXTURE_SCALES = (2.0, 4.0, 8.0)


@dataclass
class CorpusPair:
    reference: str
    name: str
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)


def distortion_corpus(seed: int = 2020, size: int = 64) -> list[CorpusPair]:
    """Deterministic reference/test pairs.

    Each reference is a smooth random texture; each gets additive noise,
    blur and checkerboard dither at graded, moderate strengths (13 tests
    per reference).
    """
    rng = np.random.default_rng(seed)
    out = []
    for scale in CORPUS_TEXTURE_SCALES:
        ref = f"texture-{scale:g}"
        base = smooth_field(size, rng, sigma=scale)
        for s in CORPUS_NOISE:
            noisy = np.clip(base + s * rng.standard_normal(base.shape), 0.0, 1.0)
            out.append(CorpusPair(ref, f"{ref}/noise-{s:g}", base, noisy))
        for s in CORPUS_BLUR:
            blurred = np.clip(gaussian_blur(base, s), 0.0, 1.0)
            out.append(CorpusPair(ref, f"{ref}/blur-{s:g}", base, blurred))
        for amp in CORPUS_DITHER:
            dithered = patterns.dither_pair(base, amp / 255)[0]
            out.append(CorpusPair(ref, f"{ref}/dither-{amp}", base, dithered))
    return out


@dataclass
class CorpusCorrelation:
    """R^2 of MSE* against SSIM* grouped three ways.

    ``per_reference`` fits each reference image's distortion series
    separately; ``pooled`` fits image-level means of all pairs at once;
    ``local`` fits every window of every pair.
    """

    per_reference: dict[str, CorrelationReport]
    pooled: CorrelationReport
    local: CorrelationReport

    @property
    def min_reference_r_squared(self) -> float:
        return min(r.r_squared for r in self.per_reference.values())

    def to_dict(self) -> dict:
        return {"per_reference": {k: v.to_dict() for k, v in self.per_reference.items()},
                "min_reference_r_squared": self.min_reference_r_squared,
                "pooled": self.pooled.to_dict(), "local": self.local.to_dict()}


def corpus_correlation(corpus: list[CorpusPair] | None = None,
                       params: SsimParams = SsimParams()) -> CorpusCorrelation:
    corpus = distortion_corpus() if corpus is None else corpus
    rows = [(p.reference, summarize_pair(p.name, p.a, p.b, params)) for p in corpus]
    groups: dict[str, list[PairSummary]] = {}
    for ref, r in rows:
        groups.setdefault(ref, []).append(r)
    per_ref = {ref: correlate([r.ssim_star for r in g], [r.mse_star for r in g])
               for ref, g in groups.items()}
    summaries = [r for _, r in rows]
    pooled = correlate([r.ssim_star for r in summaries], [r.mse_star for r in summaries])
    local = correlate(np.concatenate([r.local_ssim_star.ravel() for r in summaries]),
                      np.concatenate([r.local_mse_star.ravel() for r in summaries]))
    return CorpusCorrelation(per_ref, pooled, local)


def noise_series(seed: int = 7, size: int = 64,
                 sigmas=(0.004, 0.006, 0.008, 0.01, 0.012, 0.015, 0.018, 0.022, 0.026, 0.03)
                 ) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Zero-mean noise on one base image, so every pair has near-equal mean."""
    rng = np.random.default_rng(seed)
    base = smooth_field(size, rng, lo=0.3, hi=0.7)
    out = []
    for s in sigmas:
        noisy = np.clip(base + s * rng.standard_normal(base.shape), 0.0, 1.0)
        out.append((f"noise-{s:g}", base, noisy))
    return out


def psnr_linearity(series=None, lo: float = 0.2, hi: float = 0.8,
                   max_mean_gap: float = 0.01,
                   params: SsimParams = SsimParams()) -> tuple[float, int]:
    """Linear-fit R^2 of PSNR against pooled SSIM*, restricted to pairs with
    near-equal means and SSIM* in ``[lo, hi]``. Returns ``(r2, n_used)``."""
    series = noise_series() if series is None else series
    rows = [summarize_pair(n, a, b, params) for n, a, b in series]
    keep = [r for r in rows if lo <= r.ssim_star <= hi and r.mean_gap <= max_mean_gap]
    if len(keep) < 3:
        raise ValueError(f"only {len(keep)} pairs fall in the SSIM* window [{lo}, {hi}]")
    x = np.array([r.ssim_star for r in keep])
    y = np.array([r.psnr for r in keep])
    return r_squared(x, y, 1)[0], len(keep)
