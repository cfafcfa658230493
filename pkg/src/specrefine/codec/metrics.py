"""Quality and rate-distortion metrics.

``bd_metrics`` implements the standard Bjontegaard-delta comparison of
two rate-distortion curves: fit a cubic polynomial to each curve
(PSNR as a function of log-rate for the quality delta, log-rate as a
function of PSNR for the rate delta), integrate both fits over the
shared interval, and report the mean gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared error between two same-shaped images."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(reference: np.ndarray, distorted: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for 8-bit content.

    Identical inputs are reported as 99 dB rather than infinity so the
    value stays usable in curve fits and tables.
    """
    err = mse(reference, distorted)
    if err == 0.0:
        return 99.0
    return float(min(10.0 * np.log10(255.0**2 / err), 99.0))


@dataclass(frozen=True)
class RDPoint:
    """One operating point of a codec run."""

    rate_kbps: float
    psnr_db: float

    def __post_init__(self) -> None:
        if self.rate_kbps <= 0:
            raise ValueError("rate must be positive")


def _bd_average(
    anchor: Sequence[RDPoint],
    test: Sequence[RDPoint],
    swap_axes: bool,
) -> float:
    """Mean vertical gap between two cubic RD-curve fits.

    With ``swap_axes`` false the curves map log-rate -> PSNR (quality
    delta); with it true they map PSNR -> log-rate (log-rate delta).
    """
    if len(anchor) < 4 or len(test) < 4:
        raise ValueError("bd metrics need at least 4 rate-distortion points per curve")

    def fit(points: Sequence[RDPoint]) -> tuple[np.ndarray, float, float]:
        log_rate = np.log(np.array([p.rate_kbps for p in points], dtype=np.float64))
        quality = np.array([p.psnr_db for p in points], dtype=np.float64)
        x, y = (quality, log_rate) if swap_axes else (log_rate, quality)
        order = np.argsort(x)
        x, y = x[order], y[order]
        if np.unique(x).size < 4:
            raise ValueError("rate-distortion points are degenerate along the fit axis")
        return np.polyfit(x, y, 3), float(x[0]), float(x[-1])

    poly_a, lo_a, hi_a = fit(anchor)
    poly_t, lo_t, hi_t = fit(test)
    lo, hi = max(lo_a, lo_t), min(hi_a, hi_t)
    if hi <= lo:
        raise ValueError("rate-distortion curves do not overlap")
    int_a = np.polyint(poly_a)
    int_t = np.polyint(poly_t)
    area_a = np.polyval(int_a, hi) - np.polyval(int_a, lo)
    area_t = np.polyval(int_t, hi) - np.polyval(int_t, lo)
    return (area_t - area_a) / (hi - lo)


def bd_metrics(
    anchor: Sequence[RDPoint], test: Sequence[RDPoint]
) -> tuple[float, float]:
    """(BD rate reduction in percent, BD quality delta in dB).

    Positive values mean the test curve is better than the anchor: it
    spends fewer bits at equal PSNR, or reaches higher PSNR at equal
    rate.
    """
    delta_psnr = _bd_average(anchor, test, swap_axes=False)
    delta_log_rate = _bd_average(anchor, test, swap_axes=True)
    rate_reduction = (1.0 - float(np.exp(delta_log_rate))) * 100.0
    return rate_reduction, float(delta_psnr)
