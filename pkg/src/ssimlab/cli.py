"""Command-line front end.

Subcommands: compare, generate, sweep, minima, scan, mse-check, repro.
Exit status is 0 on success, 1 when ``repro`` finds a tolerance violation
and 2 on any error; files written by a failing command are removed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, color, extremal, heatmap, io, mse, patterns, repro
from ._backend import BACKEND
from .core import UNDEFINED_POLICIES, SsimParams, compare, local_stats

SCHEMA = 1
COLOR_PATHS = ("gray-rec601", "gray-paper", "gray-matlab", "ycbcr-weighted")


class Artifacts:
    """Track written files so a failed command can remove them."""

    def __init__(self):
        self.paths: list[Path] = []

    def add(self, path) -> Path:
        self.paths.append(Path(path))
        return Path(path)

    def rollback(self) -> None:
        for p in reversed(self.paths):
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k1", type=float, default=0.01)
    p.add_argument("--k2", type=float, default=0.03)
    p.add_argument("--dynamic-range", choices=("unit", "8bit"), default="unit",
                   help="unit: samples v/255 with L=1; 8bit: samples 0..255 with L=255")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--window", type=int, default=11)
    p.add_argument("--sigma", type=float, default=1.5)
    p.add_argument("--kernel", choices=("gaussian", "uniform"), default="gaussian")
    p.add_argument("--undefined-policy", choices=UNDEFINED_POLICIES, default="flag-and-nan")


def _params(args) -> SsimParams:
    return SsimParams(
        K1=args.k1, K2=args.k2, L=255.0 if args.dynamic_range == "8bit" else 1.0,
        alpha=args.alpha, beta=args.beta, gamma=args.gamma,
        window_size=args.window, sigma=args.sigma, kernel=args.kernel,
        undefined_policy=args.undefined_policy,
    )


def _to_unit(img: np.ndarray) -> np.ndarray:
    return img.astype(np.float64) / 255.0


def _gray_pair(a8: np.ndarray, b8: np.ndarray, color_path: str) -> tuple[np.ndarray, np.ndarray]:
    """Reduce two loaded 8-bit images to unit-range grayscale."""
    coeffs = color_path.split("-", 1)[1]
    out = []
    for img in (a8, b8):
        if img.ndim == 3:
            out.append(color.rgb_to_gray(img, coeffs, quantize=True))
        else:
            out.append(_to_unit(img))
    return out[0], out[1]


def _load_pair(ref_path, test_path):
    a8, b8 = io.load_png(ref_path), io.load_png(test_path)
    if a8.shape[:2] != b8.shape[:2]:
        raise ValueError(f"image dimensions differ: {a8.shape[1]}x{a8.shape[0]} vs "
                         f"{b8.shape[1]}x{b8.shape[0]}")
    return a8, b8


def _emit(obj, json_path, artifacts: Artifacts) -> None:
    if json_path:
        artifacts.add(io.write_json(json_path, obj))
    else:
        sys.stdout.write(io.dumps(obj) + "\n")


def cmd_compare(args, artifacts: Artifacts) -> int:
    params = _params(args)
    a8, b8 = _load_pair(args.ref, args.test)
    channels = None
    if args.color_path == "ycbcr-weighted":
        rgb = [np.repeat(x[..., None], 3, axis=2) if x.ndim == 2 else x for x in (a8, b8)]
        ya, yb = color.rgb_to_ycbcr(rgb[0]), color.rgb_to_ycbcr(rgb[1])
        reports = [compare(ya[..., i] * params.L, yb[..., i] * params.L, params)
                   for i in range(3)]
        weights = color.YCBCR_WEIGHTS
        ssim_map = sum(w * r.maps.ssim_map for w, r in zip(weights, reports))
        main = reports[0]
        maps = {"ssim": ssim_map, "l": main.maps.l_map, "c": main.maps.c_map,
                "s": main.maps.s_map}
        mask = reports[0].maps.undefined_mask | reports[1].maps.undefined_mask \
            | reports[2].maps.undefined_mask
        finite = np.isfinite(ssim_map)
        if not finite.any():
            raise ValueError("every pixel of the SSIM map is undefined; nothing to pool")
        mssim = float(ssim_map[finite].mean())
        channels = {name: r.mssim for name, r in zip(("Y", "Cr", "Cb"), reports)}
        body = main.to_dict()
        body.update(mssim=mssim, defined_count=int(finite.sum()),
                    undefined_count=int(mask.sum()),
                    undefined_fraction=float(mask.sum()) / mask.size)
    else:
        ga, gb = _gray_pair(a8, b8, args.color_path)
        r = compare(ga * params.L, gb * params.L, params)
        maps = {"ssim": r.maps.ssim_map, "l": r.maps.l_map, "c": r.maps.c_map,
                "s": r.maps.s_map}
        mask = r.maps.undefined_mask
        body = r.to_dict()

    report = {"schema": SCHEMA, "command": "compare",
              "inputs": {"reference": str(args.ref), "test": str(args.test)},
              "mode": {"color_path": args.color_path, "dynamic_range": args.dynamic_range,
                       "backend": BACKEND}}
    params_echo = body.pop("params")
    report.update(body)
    if channels is not None:
        report["channels"] = channels
    report["params"] = params_echo
    files = {}
    if args.emit_maps:
        d = Path(args.emit_maps)
        d.mkdir(parents=True, exist_ok=True)
        for name, m in maps.items():
            files[name] = str(artifacts.add(io.write_raw_map(d / f"{name}.f64", m)))
    if args.emit_heatmaps:
        d = Path(args.emit_heatmaps)
        d.mkdir(parents=True, exist_ok=True)
        for name, m in maps.items():
            hm = heatmap.render(m, mask if name == "ssim" else None)
            artifacts.add(io.save_png(d / f"{name}.png", hm.to_uint8()))
        report["heatmap_legend"] = heatmap.LEGEND
    if args.raw_dump:
        files["raw_dump"] = str(artifacts.add(io.write_raw_map(args.raw_dump, maps["ssim"])))
    report["map_files"] = files
    _emit(report, args.json, artifacts)
    return 0


def cmd_generate(args, artifacts: Artifacts) -> int:
    spec = patterns.PatternSpec.parse([args.kind, *args.params])
    images = spec.render()
    out = Path(args.output or f"{spec.kind}.png")
    out.parent.mkdir(parents=True, exist_ok=True)
    if len(images) == 1:
        paths = [out]
    else:
        paths = [out.with_name(f"{out.stem}_{s}{out.suffix or '.png'}") for s in ("a", "b")]
    for p, img in zip(paths, images):
        artifacts.add(io.save_png(p, img))
    for p in paths:
        print(p)
    return 0


def cmd_sweep(args, artifacts: Artifacts) -> int:
    ref = {"black": 0.0, "white": 1.0}[args.reference]
    rows = patterns.luminance_sweep(ref, args.steps)
    if args.output:
        artifacts.add(io.write_csv(args.output, ("value", "mssim"), rows))
    else:
        sys.stdout.write("value,mssim\n")
        for v, m in rows:
            sys.stdout.write(f"{v:.17g},{m:.17g}\n")
    return 0


def cmd_minima(args, artifacts: Artifacts) -> int:
    params = _params(args)
    m = extremal.component_minima(params)
    obj = {"schema": SCHEMA, "command": "minima", **m.to_dict(),
           "printed": {"l_min": round(m.l_min, 4), "c_min": round(m.c_min, 4),
                       "s_min": round(m.s_min, 4)}}
    _emit(obj, args.json, artifacts)
    return 0


def cmd_scan(args, artifacts: Artifacts) -> int:
    params = _params(args)
    a8, b8 = _load_pair(args.ref, args.test)
    ga, gb = _gray_pair(a8, b8, "gray-rec601")
    base = SsimParams(K1=params.K1, K2=params.K2, L=params.L, window_size=params.window_size,
                      sigma=params.sigma, kernel=params.kernel)
    r = compare(ga * params.L, gb * params.L, base)
    hazard = extremal.undefined_scan(r.maps.s_map, params.gamma)
    obj = {"schema": SCHEMA, "command": "scan",
           "inputs": {"reference": str(args.ref), "test": str(args.test)},
           **hazard.to_dict(), "min_s": float(np.min(r.maps.s_map))}
    _emit(obj, args.json, artifacts)
    return 0


def cmd_mse_check(args, artifacts: Artifacts) -> int:
    params = _params(args)
    obj = {"schema": SCHEMA, "command": "mse-check"}
    if args.ref and args.test:
        a8, b8 = _load_pair(args.ref, args.test)
        ga, gb = _gray_pair(a8, b8, "gray-rec601")
        a, b = ga * params.L, gb * params.L
        kernel = params.make_kernel()
        summary = mse.summarize_pair("input", a, b, params)
        obj["inputs"] = {"reference": str(args.ref), "test": str(args.test)}
        obj["identity_max_residual"] = mse.identity_residual(a, b, kernel)
        obj["ssim_star"] = summary.ssim_star
        obj["mse_star"] = summary.mse_star
        obj["psnr_db"] = summary.psnr
        stats = local_stats(a, b, kernel)
        star = mse.ssim_star(stats)
        obj["ssim_star_undefined"] = int(star.undefined_mask.sum())
        obj["ssim_star_degenerate"] = int(star.degenerate_mask.sum())
        try:
            obj["local_correlation"] = mse.correlate(star.ssim_map, mse.local_mse(stats)).to_dict()
        except ValueError as exc:
            obj["local_correlation"] = {"error": str(exc)}
    elif args.ref or args.test:
        raise ValueError("mse-check takes both REF and TEST, or neither with --corpus")
    if args.corpus:
        obj["corpus"] = mse.corpus_correlation(params=params).to_dict()
        r2, n = mse.psnr_linearity(params=params)
        obj["psnr_linearity"] = {"r_squared": r2, "n": n}
    if len(obj) == 2:
        raise ValueError("nothing to check: pass REF TEST and/or --corpus")
    _emit(obj, args.json, artifacts)
    return 0


def cmd_repro(args, artifacts: Artifacts) -> int:
    groups = None if args.group == "all" else [args.group]
    out = Path(args.out) if args.out else None
    checks = repro.run(groups, out)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssimlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="compare two PNG images")
    p.add_argument("ref")
    p.add_argument("test")
    _add_param_flags(p)
    p.add_argument("--color-path", choices=COLOR_PATHS, default="gray-rec601")
    p.add_argument("--emit-maps", metavar="DIR", help="write ssim/l/c/s raw map dumps")
    p.add_argument("--emit-heatmaps", metavar="DIR", help="write ssim/l/c/s heatmap PNGs")
    p.add_argument("--raw-dump", metavar="PATH", help="write the SSIM map as a raw dump")
    p.add_argument("--json", metavar="PATH", help="report path (default: stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("generate", help="write a synthetic pattern as 8-bit PNG")
    p.add_argument("kind", choices=patterns.PATTERN_KINDS)
    p.add_argument("params", nargs="*", help="WIDTH HEIGHT [VALUES...]")
    p.add_argument("-o", "--output", help="output PNG (pairs get _a/_b suffixes)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="MSSIM of a flat image against a brightness ramp")
    p.add_argument("--reference", choices=("black", "white"), default="black")
    p.add_argument("--steps", type=int, default=256)
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("minima", help="closed-form minima of l, c, s")
    _add_param_flags(p)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_minima)

    p = sub.add_parser("scan", help="count pixels where s**gamma is undefined")
    p.add_argument("ref")
    p.add_argument("test")
    _add_param_flags(p)
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("mse-check", help="MSE identity residual and SSIM*/MSE* correlation")
    p.add_argument("ref", nargs="?")
    p.add_argument("test", nargs="?")
    _add_param_flags(p)
    p.add_argument("--corpus", action="store_true",
                   help="also fit R^2 over the generated distortion corpus")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_mse_check)

    p = sub.add_parser("repro", help="regenerate the published golden values")
    p.add_argument("group", nargs="?", default="all", choices=("all", *repro.GROUPS))
    p.add_argument("--out", metavar="DIR", help="write CSV/PNG/JSON artifacts here")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    artifacts = Artifacts()
    try:
        return args.func(args, artifacts)
    except (ValueError, OSError) as exc:
        artifacts.rollback()
        print(f"ssimlab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
