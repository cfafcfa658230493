"""Sparse spectral refinement of motion-compensated video prediction.

The package splits into four layers:

* patch model   — :mod:`.geometry`, :mod:`.weights`, :mod:`.basis`,
                  :mod:`.model`
* engines       — :mod:`.engines` (plain, orthogonal, and relaxed
                  orthogonal greedy approximation)
* codec harness — :mod:`.codec` (motion search, mode decision,
                  quantization, rate proxy, metrics, encoder/decoder)
* front end     — :mod:`.videoio`, :mod:`.config`, :mod:`.experiment`,
                  :mod:`.cli`
"""

from .basis import BasisSet, basis_for_shape
from .engines import (
    BA_DEFAULT,
    FSA_DEFAULT,
    RBA_DEFAULT,
    EngineConfig,
    IterationStats,
    ProjectionGain,
    ba_refine,
    extract_predictor,
    fsa_refine,
    projection_gain,
    rba_refine,
    solve_coefficient_update,
)
from .geometry import Patch, PatchGeometry, Region, assemble_patch, base_geometry
from .model import SparseModel, evaluate_model, weighted_error_energy
from .weights import WeightMask, build_weight_mask

__all__ = [
    "BA_DEFAULT",
    "BasisSet",
    "EngineConfig",
    "FSA_DEFAULT",
    "IterationStats",
    "Patch",
    "PatchGeometry",
    "ProjectionGain",
    "RBA_DEFAULT",
    "Region",
    "SparseModel",
    "WeightMask",
    "assemble_patch",
    "ba_refine",
    "base_geometry",
    "basis_for_shape",
    "build_weight_mask",
    "evaluate_model",
    "extract_predictor",
    "fsa_refine",
    "projection_gain",
    "rba_refine",
    "solve_coefficient_update",
    "weighted_error_energy",
]

__version__ = "0.1.0"
