"""SSIM with per-component diagnostic maps and reproductions of its failure cases."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .core import (ComparisonReport, Kernel, LocalStats, SsimMaps, SsimParams,
                   UndefinedResultError, compare, contrast_component, gaussian_kernel,
                   local_stats, luminance_component, mssim, pool_mssim, ssim_full,
                   ssim_maps, ssim_simplified, structure_component, uniform_kernel)

__all__ = [
    "BACKEND", "ComparisonReport", "Kernel", "LocalStats", "SsimMaps", "SsimParams",
    "UndefinedResultError", "compare", "contrast_component", "gaussian_kernel",
    "local_stats", "luminance_component", "mssim", "pool_mssim", "ssim_full",
    "ssim_maps", "ssim_simplified", "structure_component", "uniform_kernel",
]
