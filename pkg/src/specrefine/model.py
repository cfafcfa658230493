"""Sparse superposition model and the weighted fitting error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from .geometry import Patch, PatchGeometry
from .weights import WeightMask


@dataclass(frozen=True)
class SparseModel:
    """Weighted superposition of selected basis atoms.

    ``indices`` lists the selected atoms in selection order and
    ``coefficients`` their expansion weights; ``iterations`` is the
    number of refinement iterations that produced the model.
    """

    indices: tuple[int, ...] = ()
    coefficients: tuple[float, ...] = ()
    iterations: int = 0

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.coefficients):
            raise ValueError("indices and coefficients must have equal length")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("selected indices must be unique")

    def __len__(self) -> int:
        return len(self.indices)


def evaluate_model(
    model: SparseModel, basis: BasisSet, geometry: PatchGeometry | None = None
) -> np.ndarray:
    """Superpose the model's atoms into a full grid."""
    if geometry is not None and geometry.shape != (basis.rows, basis.cols):
        raise ValueError(
            f"geometry {geometry.shape} does not match basis ({basis.rows}, {basis.cols})"
        )
    grid = np.zeros((basis.rows, basis.cols), dtype=np.float64)
    for index, coeff in zip(model.indices, model.coefficients):
        if not 0 <= index < basis.size:
            raise ValueError(f"unknown basis index {index}")
        grid += coeff * basis.atom(index)
    return grid


def weighted_error_energy(
    patch: Patch, approximation: np.ndarray, mask: WeightMask
) -> float:
    """Mask-weighted squared error between patch samples and a model grid.

    UNKNOWN samples carry zero weight, so their (zeroed) values never
    contribute.
    """
    if approximation.shape != patch.values.shape:
        raise ValueError(
            f"approximation shape {approximation.shape} != patch {patch.values.shape}"
        )
    if mask.shape != patch.values.shape:
        raise ValueError(f"mask shape {mask.shape} != patch {patch.values.shape}")
    diff = patch.values - approximation
    return float(np.sum(mask.weights * diff * diff))
