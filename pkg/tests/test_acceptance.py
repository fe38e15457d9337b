"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (visible even under
pytest's output capture) and then asserts. Run directly with
``python tests/test_acceptance.py`` for the summary alone.
"""

import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

from ssimlab import (SsimParams, compare, gaussian_kernel, local_stats, ssim_full,
                     ssim_simplified, luminance_component, contrast_component,
                     structure_component)
from ssimlab import cli, extremal, mse, patterns, repro

KERNEL = gaussian_kernel(11, 1.5)


def _line(number, title, ok, detail=""):
    return f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line past pytest's capture and return the outcome."""

    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print("\n" + _line(number, title, ok, detail))
        return ok

    return emit


def _group(name):
    checks = repro.GROUPS[name](None)
    bad = [c for c in checks if not c.passed]
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} checks" + (
        "; failing: " + ", ".join(c.name for c in bad) if bad else "")


def test_criterion_01_component_minima(verdict):
    ok, detail = _group("minima")
    rc = cli.main(["minima"])
    ok = ok and rc == 0
    assert verdict(1, "component minima and witness pairs", ok, detail)


def test_criterion_02_constant_gray(verdict):
    ok = True
    vals = []
    for ref, test, expected in repro.CONSTANT_GRAY_CASES:
        m = compare(np.full((32, 32), float(ref)), np.full((32, 32), float(test)),
                    SsimParams.eight_bit()).mssim
        ok &= abs(m - expected) <= 1e-5
        vals.append(f"{ref}/{test}={m:.5f}")
    assert verdict(2, "constant-gray golden values, +/- 1e-5", ok, ", ".join(vals))


def test_criterion_03_scale_invariance(verdict):
    gap = 0.0
    for ref, test, _ in repro.CONSTANT_GRAY_CASES:
        a, b = np.full((32, 32), float(ref)), np.full((32, 32), float(test))
        gap = max(gap, abs(compare(a, b, SsimParams.eight_bit()).mssim
                           - compare(a / 255, b / 255).mssim))
    assert verdict(3, "L=255 vs L=1 agree within 1e-9", gap < 1e-9, f"max gap {gap:.2e}")


def test_criterion_04_color(verdict):
    ok, detail = _group("color")
    assert verdict(4, "color golden values via rec601 + quantization, +/- 1e-3", ok, detail)


def test_criterion_05_gradients(verdict):
    ok, detail = _group("gradient")
    assert verdict(5, "mirrored-gradient golden values and valid width", ok, detail)


def test_criterion_06_undefined(verdict):
    ok, detail = _group("undefined")
    assert verdict(6, "non-integer gamma hazard flagged, excluded, rejected", ok, detail)


def test_criterion_07_mse_identity(verdict):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        a, b = rng.random((24, 24)), rng.random((24, 24))
        worst = max(worst, mse.identity_residual(a, b, KERNEL))
    assert verdict(7, "MSE identity over 100 random pairs < 1e-12", worst < 1e-12,
                   f"max residual {worst:.2e}")


def test_criterion_08_ssim_star_correspondence(verdict):
    corr = mse.corpus_correlation()
    r2_psnr, n = mse.psnr_linearity()
    ok = corr.min_reference_r_squared >= 0.9 and r2_psnr >= 0.9 and n >= 3
    detail = (f"corpus R^2 min {corr.min_reference_r_squared:.4f} over "
              f"{len(mse.distortion_corpus())} pairs, PSNR linear R^2 {r2_psnr:.4f} on {n} pairs")
    assert verdict(8, "SSIM*/MSE* R^2 >= 0.9 and PSNR linearity", ok, detail)


def test_criterion_09_properties(verdict):
    rng = np.random.default_rng(9)
    p = SsimParams()
    fails = []
    for _ in range(100):
        a = rng.random((16, 16))
        b = np.clip(a + rng.uniform(0, 0.5) * rng.standard_normal((16, 16)), 0, 1)
        ab, ba = compare(a, b), compare(b, a)
        if ab.mssim != pytest.approx(ba.mssim, abs=1e-15):
            fails.append("symmetry")
        if abs(compare(a, a).mssim - 1.0) > 1e-12:
            fails.append("identity")
        m = ab.maps.ssim_map
        if not (np.all(m > -1) and np.all(m <= 1 + 1e-15)):
            fails.append("range")
        st = local_stats(a, b, KERNEL)
        full = ssim_full(luminance_component(st, p), contrast_component(st, p),
                         structure_component(st, p), p).ssim_map
        if np.max(np.abs(full - ssim_simplified(st, p).ssim_map)) >= 1e-12:
            fails.append("full-vs-simplified")
        if np.any(st.cov ** 2 > st.var_a * st.var_b * (1 + 1e-12) + 1e-18) or \
                np.any(st.var_a < 0) or np.any(st.var_b < 0):
            fails.append("cauchy-schwarz")
    levels = rng.random((10_000, 3))
    violations = 0
    for x, y, z in levels:
        imgs = [np.full((11, 11), v) for v in (x, y, z)]
        d = [extremal.brunet_distances(local_stats(imgs[i], imgs[j], KERNEL))
             for i, j in ((0, 2), (0, 1), (1, 2))]
        for attr in ("d_l", "d_cs"):
            ac, ab_, bc = (float(getattr(r, attr).mean()) for r in d)
            violations += ac > ab_ + bc + 1e-12
    ok = not fails and violations == 0
    detail = f"{len(set(fails))} property failures {sorted(set(fails))}, {violations} triangle violations in 10000 triples"
    assert verdict(9, "property suites", ok, detail)


def test_criterion_10_sweep(verdict):
    ok, detail = _group("sweep")
    assert verdict(10, "luminance sweep bound and closed form", ok, detail)


def test_criterion_11_determinism(verdict):
    with tempfile.TemporaryDirectory() as d:
        d1, d2 = Path(d) / "one", Path(d) / "two"
        checks1 = repro.run("all", d1)
        repro.run("all", d2)
        f1 = sorted(p.relative_to(d1) for p in d1.rglob("*") if p.is_file())
        f2 = sorted(p.relative_to(d2) for p in d2.rglob("*") if p.is_file())
        same = f1 == f2 and all((d1 / f).read_bytes() == (d2 / f).read_bytes() for f in f1)
        all_ok = all(c.passed for c in checks1)
    assert verdict(11, "repro all twice gives byte-identical artifacts", same and all_ok,
                   f"{len(f1)} files, {sum(c.passed for c in checks1)}/{len(checks1)} checks")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
