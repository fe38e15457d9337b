"""Synthetic images: constant fields, pixel checkerboards, gradients, dithers.

All generators return float64 arrays with values in ``[0, 1]`` and are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SsimParams, compare


def _check_dims(w: int, h: int) -> None:
    if w < 1 or h < 1:
        raise ValueError(f"image dimensions must be positive, got {w}x{h}")


def _check_intensity(v: float, name: str = "value") -> None:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")


def constant(w: int, h: int, v: float) -> np.ndarray:
    _check_dims(w, h)
    _check_intensity(v)
    return np.full((h, w), float(v))


def checkerboard(w: int, h: int, a: float, b: float) -> np.ndarray:
    """Pixel-sized checkerboard: ``a`` where ``x + y`` is even, else ``b``."""
    _check_dims(w, h)
    _check_intensity(a, "a")
    _check_intensity(b, "b")
    yy, xx = np.indices((h, w))
    return np.where((xx + yy) % 2 == 0, float(a), float(b))


def gradient(w: int, h: int) -> np.ndarray:
    """Horizontal ramp ``x / (w - 1)``, exactly 0 at the left and 1 at the right."""
    _check_dims(w, h)
    if w < 2:
        raise ValueError("a gradient needs w >= 2")
    return np.tile(np.arange(w, dtype=np.float64) / (w - 1), (h, 1))


def gradient_pair(w: int, h: int) -> tuple[np.ndarray, np.ndarray]:
    """A horizontal ramp and its left-right mirror."""
    a = gradient(w, h)
    return a, np.ascontiguousarray(a[:, ::-1])


def dither_pair(base: np.ndarray, amplitude: float = 6 / 255) -> tuple[np.ndarray, np.ndarray]:
    """Add and subtract ``amplitude`` in a checkerboard, and the inverse checkerboard.

    The first image gets ``+amplitude`` on even-parity pixels and
    ``-amplitude`` on odd ones; the second the opposite. Both are clamped
    to ``[0, 1]``.
    """
    if amplitude < 0:
        raise ValueError("dither amplitude must be non-negative")
    base = np.asarray(base, dtype=np.float64)
    h, w = base.shape
    yy, xx = np.indices((h, w))
    sign = np.where((xx + yy) % 2 == 0, 1.0, -1.0)
    first = np.clip(base + amplitude * sign, 0.0, 1.0)
    second = np.clip(base - amplitude * sign, 0.0, 1.0)
    return first, second


def sweep_values(steps: int) -> np.ndarray:
    """Evenly spaced grid over ``[0, 1]`` including both endpoints."""
    if steps < 2:
        raise ValueError("a sweep needs at least 2 steps")
    return np.arange(steps, dtype=np.float64) / (steps - 1)


def luminance_sweep(reference_value: float, steps: int = 256,
                    params: SsimParams = SsimParams(), size: int | None = None
                    ) -> list[tuple[float, float]]:
    """MSSIM of a constant reference image against constants spanning [0, 1].

    Since every window is flat, ``c = s = 1`` and each value is the
    luminance term alone.
    """
    _check_intensity(reference_value, "reference_value")
    n = size or params.window_size
    ref = constant(n, n, reference_value)
    return [(float(v), compare(ref, constant(n, n, v), params).mssim)
            for v in sweep_values(steps)]


PATTERN_KINDS = ("constant", "checkerboard", "gradient", "gradient-pair", "dither-pair")


@dataclass(frozen=True)
class PatternSpec:
    """A generator call in serializable form.

    ``args`` holds the kind-specific values: ``(v,)`` for constant,
    ``(a, b)`` for checkerboard, ``(base_value, amplitude)`` for dither-pair,
    nothing for the gradients.
    """

    kind: str
    width: int
    height: int
    args: tuple = field(default_factory=tuple)

    @classmethod
    def parse(cls, tokens: list[str]) -> "PatternSpec":
        """Parse ``KIND W H [ARGS...]``, e.g. ``checkerboard 64 64 0 1``."""
        if len(tokens) < 3:
            raise ValueError("pattern spec needs KIND WIDTH HEIGHT [ARGS...]")
        kind = tokens[0]
        if kind not in PATTERN_KINDS:
            raise ValueError(f"unknown pattern kind {kind!r}; choose from {PATTERN_KINDS}")
        try:
            w, h = int(tokens[1]), int(tokens[2])
            args = tuple(float(t) for t in tokens[3:])
        except ValueError as exc:
            raise ValueError(f"malformed pattern spec {' '.join(tokens)!r}") from exc
        expected = {"constant": (1,), "checkerboard": (2,), "gradient": (0,),
                    "gradient-pair": (0,), "dither-pair": (1, 2)}[kind]
        if len(args) not in expected:
            raise ValueError(f"{kind} takes {' or '.join(map(str, expected))} extra argument(s)")
        return cls(kind, w, h, args)

    def render(self) -> list[np.ndarray]:
        w, h = self.width, self.height
        if self.kind == "constant":
            return [constant(w, h, *self.args)]
        if self.kind == "checkerboard":
            return [checkerboard(w, h, *self.args)]
        if self.kind == "gradient":
            return [gradient(w, h)]
        if self.kind == "gradient-pair":
            return list(gradient_pair(w, h))
        base = constant(w, h, self.args[0])
        return list(dither_pair(base, *self.args[1:]))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "width": self.width, "height": self.height,
                "args": list(self.args)}
