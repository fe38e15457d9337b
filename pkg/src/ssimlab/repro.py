"""Regenerate the published numbers for SSIM's pathological cases.

Each group returns a list of :class:`Check` and optionally writes artifacts
(CSV sweeps, PNG patterns, heatmaps) into an output directory.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import color, extremal, heatmap, io, mse, patterns
from .core import SsimParams, UndefinedResultError, compare, pool_mssim, ssim_maps

EIGHT_BIT = SsimParams.eight_bit()
UNIT = SsimParams()

# (reference level, test level, published MSSIM) for flat 8-bit images
CONSTANT_GRAY_CASES = (
    (253, 255, 0.99997),
    (128, 130, 0.99988),
    (0, 2, 0.61914),
    (222, 255, 0.99047),
    (0, 26, 0.00953),
)

# white vs. a color with one channel lowered
COLOR_CASES = (
    ((0.56, 1.0, 1.0), 0.99047),
    ((1.0, 0.78, 1.0), 0.99047),
    ((1.0, 1.0, 0.0), 0.99276),
)

# size -> (MSSIM, mean s)
GRADIENT_CASES = {256: (0.51, 0.86), 64: (-0.07, -0.10), 16: (-0.82, -0.90)}


@dataclass
class Check:
    """One numeric claim.

    ``op`` is ``close`` (|value - expected| <= tol), ``printed`` (value
    rounded to ``tol`` decimals equals expected), or one of ``lt``, ``ge``,
    ``gt`` comparing value with expected.
    """

    group: str
    name: str
    value: float
    expected: float
    op: str = "close"
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        v, e = self.value, self.expected
        if self.op == "close":
            return bool(abs(v - e) <= self.tol)
        if self.op == "printed":
            return round(v, int(self.tol)) == e
        if self.op == "lt":
            return bool(v < e)
        if self.op == "ge":
            return bool(v >= e)
        if self.op == "gt":
            return bool(v > e)
        raise ValueError(f"unknown check op {self.op!r}")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rule = {"close": f"+/- {self.tol:g}", "printed": f"to {int(self.tol)} dp"}.get(
            self.op, self.op)
        return f"{status} [{self.group}] {self.name}: {self.value:.6g} vs {self.expected:g} ({rule})"

    def to_dict(self) -> dict:
        return {"group": self.group, "name": self.name, "value": self.value,
                "expected": self.expected, "op": self.op, "tol": self.tol,
                "passed": self.passed}


def _const8(level: int, n: int = 32) -> np.ndarray:
    return np.full((n, n), float(level))


def _save_heatmap(out: Optional[Path], name: str, maps) -> None:
    if out is not None:
        io.save_png(out / name, heatmap.render(maps.ssim_map, maps.undefined_mask).to_uint8())


def minima_checks(out: Optional[Path] = None) -> list[Check]:
    g = "minima"
    m = extremal.component_minima(UNIT)
    checks = [
        Check(g, "l_min", m.l_min, 0.0001, "printed", 4),
        Check(g, "c_min", m.c_min, 0.0036, "printed", 4),
        Check(g, "s_min", m.s_min, -0.9964, "printed", 4),
    ]
    a, b = extremal.witness_pair("l", 64)
    r = compare(a, b)
    checks.append(Check(g, "l-witness mssim", r.mssim, m.l_min, "close", 1e-6))
    _save_heatmap(out, "minima_l_ssim.png", r.maps)
    for which, attr, target in (("c", "mean_c", m.c_min), ("s", "mean_s", m.s_min)):
        a, b = extremal.witness_pair(which, 64)
        r = compare(a, b)
        checks.append(Check(g, f"{which}-witness {attr} (gaussian)", getattr(r, attr),
                            target, "close", 5e-3))
        _save_heatmap(out, f"minima_{which}_ssim.png", r.maps)
        ru = compare(a, b, SsimParams(kernel="uniform"))
        checks.append(Check(g, f"{which}-witness {attr} (uniform)", getattr(ru, attr),
                            target, "close", 1e-6))
        if out is not None:
            io.save_png(out / f"minima_{which}_a.png", a)
            io.save_png(out / f"minima_{which}_b.png", b)
    return checks


def sweep_rows(reference: float, steps: int = 256) -> list[tuple[float, float]]:
    return patterns.luminance_sweep(reference, steps)


def sweep_checks(out: Optional[Path] = None, steps: int = 256) -> list[Check]:
    g = "sweep"
    black = sweep_rows(0.0, steps)
    white = sweep_rows(1.0, steps)
    if out is not None:
        io.write_csv(out / "sweep_black.csv", ("value", "mssim"), black)
        io.write_csv(out / "sweep_white.csv", ("value", "mssim"), white)
    c1 = UNIT.C1

    def closed(ref, v):
        return (2 * ref * v + c1) / (ref * ref + v * v + c1)

    resid = max(abs(m - closed(ref, v)) for ref, rows in ((0.0, black), (1.0, white))
                for v, m in rows)
    high = [m for v, m in black if v > 0.2]
    at222 = dict(white).get(222 / 255)
    checks = [
        Check(g, "black reference at v=0", black[0][1], 1.0, "close", 1e-12),
        Check(g, "max mssim vs black for v>0.2", max(high), 0.0025, "lt"),
        Check(g, "closed-form residual", resid, 1e-12, "lt"),
    ]
    if at222 is not None:
        checks.append(Check(g, "white reference at v=222/255", at222, 0.99047, "close", 1e-5))
    return checks


def constant_gray_checks(out: Optional[Path] = None) -> list[Check]:
    g = "constant-gray"
    checks = []
    for ref, test, expected in CONSTANT_GRAY_CASES:
        a8, b8 = _const8(ref), _const8(test)
        m8 = compare(a8, b8, EIGHT_BIT).mssim
        m1 = compare(a8 / 255, b8 / 255, UNIT).mssim
        checks.append(Check(g, f"{ref}/255 vs {test}/255", m8, expected, "close", 1e-5))
        checks.append(Check(g, f"{ref}/255 vs {test}/255 L=1 vs L=255 gap",
                            abs(m8 - m1), 1e-9, "lt"))
        if out is not None:
            io.save_png(out / f"gray_{ref:03d}.png", a8.astype(np.uint8))
            io.save_png(out / f"gray_{test:03d}.png", b8.astype(np.uint8))
    return checks


def color_checks(out: Optional[Path] = None) -> list[Check]:
    g = "color"
    checks = []
    white = color.constant_rgb(32, 32, (1.0, 1.0, 1.0))
    for rgb, expected in COLOR_CASES:
        test = color.constant_rgb(32, 32, rgb)
        m = color.gray_path_mssim(white, test, "rec601", quantize=True)
        label = "(" + ", ".join(f"{c:g}" for c in rgb) + ")"
        checks.append(Check(g, f"white vs {label} gray-rec601", m, expected, "close", 1e-3))
        if out is not None:
            io.save_png(out / f"color_{label.strip('()').replace(', ', '_')}.png", test)
    return checks


def gradient_checks(out: Optional[Path] = None) -> list[Check]:
    g = "gradient"
    checks = []
    for n, (exp_m, exp_s) in GRADIENT_CASES.items():
        a, b = patterns.gradient_pair(n, n)
        r = compare(a, b)
        checks.append(Check(g, f"{n}x{n} mssim", r.mssim, exp_m, "close", 0.02))
        checks.append(Check(g, f"{n}x{n} mean s", r.mean_s, exp_s, "close", 0.03))
        if n == 16:
            checks.append(Check(g, "16x16 valid map width", r.maps.ssim_map.shape[1], 6,
                                "close", 0))
        _save_heatmap(out, f"gradient_{n}_ssim.png", r.maps)
        if out is not None:
            io.save_png(out / f"gradient_{n}_a.png", a)
            io.save_png(out / f"gradient_{n}_b.png", b)
    return checks


def hazard_checks(out: Optional[Path] = None) -> list[Check]:
    g = "undefined"
    params = SsimParams(gamma=1.5)
    a, b = patterns.gradient_pair(16, 16)
    maps = ssim_maps(a, b, params)
    checks = [Check(g, "gradient-16 gamma=1.5 flagged pixels", maps.undefined_count, 1, "ge")]
    try:
        pool_mssim(maps)
        pool_error = 0.0
    except ValueError:
        pool_error = 1.0
    checks.append(Check(g, "gradient-16 pooling refuses (no defined pixel)",
                        pool_error, float(maps.defined_count == 0), "close", 0))
    _save_heatmap(out, "gradient_16_gamma1.5_ssim.png", maps)

    a, b = patterns.gradient_pair(64, 64)
    maps = ssim_maps(a, b, params)
    checks.append(Check(g, "gradient-64 gamma=1.5 flagged pixels", maps.undefined_count, 0, "gt"))
    checks.append(Check(g, "gradient-64 scan hazard count",
                        extremal.undefined_scan(maps.s_map, 1.5).count,
                        maps.undefined_count, "close", 0))
    _save_heatmap(out, "gradient_64_gamma1.5_ssim.png", maps)

    # left half mirrored, right half intact: a mix of negative and positive s
    half = np.where(np.arange(64) < 32, b, a)
    maps = ssim_maps(a, half, params)
    defined = ~maps.undefined_mask
    checks.append(Check(g, "half-mirrored gradient has flagged and defined pixels",
                        float(maps.undefined_count > 0 and defined.any()), 1.0, "close", 0))
    checks.append(Check(g, "flag-and-nan pools defined pixels only",
                        abs(pool_mssim(maps)[0] - float(maps.ssim_map[defined].mean())),
                        0.0, "close", 0))
    try:
        compare(a, b, SsimParams(gamma=1.5, undefined_policy="reject"))
        rejected = 0.0
    except UndefinedResultError:
        rejected = 1.0
    checks.append(Check(g, "reject policy aborts", rejected, 1.0, "close", 0))
    return checks


def dither_checks(out: Optional[Path] = None) -> list[Check]:
    g = "dither"
    a, b = patterns.dither_pair(patterns.constant(64, 64, 0.5), 6 / 255)
    r = compare(a, b)
    checks = [
        Check(g, "dither on mid-gray mssim", r.mssim, 0.99, "lt"),
        Check(g, "dither negative-pixel fraction", float((r.maps.ssim_map < 0).mean()), 0.5, "ge"),
    ]
    _save_heatmap(out, "dither_ssim.png", r.maps)
    return checks


def mse_checks(out: Optional[Path] = None) -> list[Check]:
    g = "mse"
    rng = np.random.default_rng(11)
    kernel = UNIT.make_kernel()
    resid = max(mse.identity_residual(rng.random((24, 24)), rng.random((24, 24)), kernel)
                for _ in range(20))
    corr = mse.corpus_correlation()
    r2_psnr, n_psnr = mse.psnr_linearity()
    checks = [
        Check(g, "MSE identity max residual", resid, 1e-12, "lt"),
        Check(g, "corpus min per-reference R^2", corr.min_reference_r_squared, 0.9, "ge"),
        Check(g, f"PSNR vs SSIM* linear R^2 ({n_psnr} pairs)", r2_psnr, 0.9, "ge"),
    ]
    if out is not None:
        io.write_json(out / "mse_correlation.json", corr.to_dict())
    return checks


GROUPS: dict[str, Callable[[Optional[Path]], list[Check]]] = {
    "minima": minima_checks,
    "sweep": sweep_checks,
    "constant-gray": constant_gray_checks,
    "color": color_checks,
    "gradient": gradient_checks,
    "undefined": hazard_checks,
    "dither": dither_checks,
    "mse": mse_checks,
}


def run(groups=None, out: Optional[Path] = None) -> list[Check]:
    names = list(GROUPS) if groups in (None, "all") else list(groups)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    checks = []
    for name in names:
        checks.extend(GROUPS[name](out))
    if out is not None:
        io.write_json(out / "repro.json", {
            "schema": 1,
            "passed": all(c.passed for c in checks),
            "checks": [c.to_dict() for c in checks],
        })
    return checks
