"""Analytic minima of the SSIM factors, image pairs that reach them, and
scans for negative-base exponentiation hazards."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import patterns
from .core import (LocalStats, SsimParams, contrast_component, is_integer_exponent,
                   structure_component)


@dataclass(frozen=True)
class ComponentMinima:
    l_min: float
    c_min: float
    s_min: float
    params: SsimParams

    def to_dict(self) -> dict:
        return {"l_min": self.l_min, "c_min": self.c_min, "s_min": self.s_min,
                "K1": self.params.K1, "K2": self.params.K2, "L": self.params.L}


def component_minima(params: SsimParams = SsimParams()) -> ComponentMinima:
    """Closed-form lower bounds of l, c and s for means and variances in range.

    l is smallest for means 0 and L, c for variances 0 and (L/2)^2, s for
    both variances (L/2)^2 with covariance -(L/2)^2. All three are ratios of
    constants to L^2, so the result does not depend on L.
    """
    L2 = params.L * params.L
    c1, c2, c3 = params.C1 / L2, params.C2 / L2, params.C3 / L2
    return ComponentMinima(
        l_min=c1 / (1.0 + c1),
        c_min=c2 / (0.25 + c2),
        s_min=(-0.25 + c3) / (0.25 + c3),
        params=params,
    )


def witness_pair(which: str, size: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Image pair driving one component to (or near) its minimum.

    ``l``: black vs white. ``c``: 128/255 gray vs a b|w checkerboard.
    ``s``: a b|w checkerboard vs its inverse.
    """
    if which == "l":
        return patterns.constant(size, size, 0.0), patterns.constant(size, size, 1.0)
    if which == "c":
        return (patterns.constant(size, size, 128 / 255),
                patterns.checkerboard(size, size, 0.0, 1.0))
    if which == "s":
        return (patterns.checkerboard(size, size, 0.0, 1.0),
                patterns.checkerboard(size, size, 1.0, 0.0))
    raise ValueError(f"witness must be one of 'l', 'c', 's', got {which!r}")


@dataclass(frozen=True)
class HazardReport:
    count: int
    fraction: float
    first: Optional[tuple[int, int]]
    gamma: float

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "hazard_count": self.count,
                "hazard_fraction": self.fraction,
                "first": None if self.first is None else {"x": self.first[0], "y": self.first[1]}}


def undefined_scan(s_map: np.ndarray, gamma: float) -> HazardReport:
    """Count pixels where ``s**gamma`` has no real value."""
    s_map = np.asarray(s_map, dtype=np.float64)
    if is_integer_exponent(gamma):
        return HazardReport(0, 0.0, None, gamma)
    neg = s_map < 0
    n = int(neg.sum())
    first = None
    if n:
        y, x = np.argwhere(neg)[0]
        first = (int(x), int(y))
    return HazardReport(n, n / s_map.size if s_map.size else 0.0, first, gamma)


@dataclass
class BrunetDistances:
    """Distance maps plus the largest deviation of ``d_l`` from
    ``|muA - muB| / sqrt(muA^2 + muB^2 + C1)``."""

    d_l: np.ndarray
    d_cs: np.ndarray
    identity_residual: float


def brunet_distances(stats: LocalStats, params: SsimParams = SsimParams()) -> BrunetDistances:
    """``sqrt(1 - l)`` and ``sqrt(1 - c*s)``, the two SSIM-derived metrics."""
    ma, mb = stats.mu_a, stats.mu_b
    # 1 - l rewritten as (muA - muB)^2 / (muA^2 + muB^2 + C1): no cancellation near l = 1
    d2 = ma * ma + mb * mb + params.C1
    diff = ma - mb
    one_minus_l = np.divide(diff * diff, d2, out=np.zeros_like(d2), where=d2 > 0)
    cs = contrast_component(stats, params) * structure_component(stats, params)
    d_l = np.sqrt(one_minus_l)
    d_cs = np.sqrt(np.maximum(1.0 - cs, 0.0))
    den = np.sqrt(d2)
    direct = np.divide(np.abs(diff), den, out=np.zeros_like(den), where=den > 0)
    residual = float(np.max(np.abs(d_l - direct))) if d_l.size else 0.0
    return BrunetDistances(d_l, d_cs, residual)
