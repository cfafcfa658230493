"""Sample weighting for the refinement objective.

The weighted fitting error treats the motion-compensated centre block
with a constant weight and the reconstructed neighbourhood with a weight
that decays exponentially with radial distance from the patch centre, so
that context close to the predicted block dominates the fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import PatchGeometry, Region


@dataclass(frozen=True, eq=False)
class WeightMask:
    """Per-sample nonnegative weights over a patch grid."""

    weights: np.ndarray
    mu: float
    rho_hat: float

    def __post_init__(self) -> None:
        self.weights.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


@lru_cache(maxsize=32)
def _radial_decay(rows: int, cols: int, rho_hat: float) -> np.ndarray:
    """rho_hat ** distance-to-centre over a rows x cols grid."""
    m = np.arange(rows, dtype=np.float64)[:, None] - (rows - 1) / 2.0
    n = np.arange(cols, dtype=np.float64)[None, :] - (cols - 1) / 2.0
    decay = rho_hat ** np.sqrt(m * m + n * n)
    decay.setflags(write=False)
    return decay


def build_weight_mask(geometry: PatchGeometry, mu: float, rho_hat: float) -> WeightMask:
    """Weights: ``mu`` on the target block, ``rho_hat**dist`` on RECON
    samples, zero elsewhere (UNKNOWN samples always get zero)."""
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must be in (0, 1], got {mu}")
    if not 0.0 < rho_hat < 1.0:
        raise ValueError(f"rho_hat must be in (0, 1), got {rho_hat}")
    weights = np.zeros(geometry.shape, dtype=np.float64)
    recon = geometry.region_mask(Region.RECON)
    if recon.any():
        decay = _radial_decay(geometry.rows, geometry.cols, float(rho_hat))
        weights[recon] = decay[recon]
    weights[geometry.region_mask(Region.TARGET)] = mu
    return WeightMask(weights, float(mu), float(rho_hat))
