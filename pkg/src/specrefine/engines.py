"""Greedy sparse approximation engines.

Three related algorithms build a sparse trigonometric model of a patch by
minimising the mask-weighted squared error:

* ``fsa_refine`` - plain greedy: per iteration, add the single atom whose
  one-dimensional weighted projection removes the most residual energy,
  using that projection coefficient directly (re-selection accumulates).
* ``ba_refine`` - orthogonal greedy: per iteration, pick the same argmax
  atom but then jointly re-solve the coefficients of *all* selected atoms
  through the weighted Gram system, leaving the residual orthogonal to
  the selected span.
* ``rba_refine`` - relaxed orthogonal greedy: per iteration, admit every
  not-yet-selected atom whose energy reduction is at least ``tau`` times
  the best one (largest gains first, capped per iteration), then do one
  joint coefficient solve.  Selecting several atoms per iteration cuts
  the iteration count dramatically at nearly the same fit quality.

The per-candidate gain scan is evaluated through a 2D FFT of the weighted
residual, which reproduces the direct sums to machine precision; the
direct single-atom formula remains available as :func:`projection_gain`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import BasisSet
from .geometry import Patch, PatchGeometry
from .model import SparseModel, evaluate_model
from .weights import WeightMask

# Relative floor below which a squared-atom weighted norm is treated as
# zero (the atom vanishes on the weighted support and its gain is 0).
_NORM_FLOOR = 1e-12

# Ridge factor for the singular-Gram retry.
_RIDGE = 1e-9


@dataclass(frozen=True)
class EngineConfig:
    """Iteration budget and relaxation parameters for the engines.

    ``tau`` and ``max_per_iteration`` only affect the relaxed engine;
    ``stop_energy`` ends the loop early once the best achievable gain
    drops to (or below) it.
    """

    max_iterations: int
    tau: float = 0.5
    max_per_iteration: int = 20
    stop_energy: float = 0.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        if self.max_per_iteration < 1:
            raise ValueError("max_per_iteration must be >= 1")
        if self.stop_energy < 0.0:
            raise ValueError("stop_energy must be >= 0")


FSA_DEFAULT = EngineConfig(max_iterations=200)
BA_DEFAULT = EngineConfig(max_iterations=20)
RBA_DEFAULT = EngineConfig(max_iterations=4, tau=0.5, max_per_iteration=20)


@dataclass(frozen=True)
class ProjectionGain:
    """Energy reduction achievable by one atom alone on the current
    residual, and the optimising coefficient."""

    basis_index: int
    delta_e: float
    coeff: float


@dataclass(frozen=True)
class IterationStats:
    """Per-iteration trace record: atoms added, their gains, the
    weighted residual energy after the update, and whether the
    coefficient solve needed regularisation."""

    selected: tuple[int, ...]
    gains: tuple[float, ...]
    energy: float
    degenerate: bool = False


def projection_gain(
    residual: np.ndarray, mask: WeightMask, phi: np.ndarray, basis_index: int = -1
) -> ProjectionGain:
    """Direct single-atom gain: ``(sum w*r*phi)**2 / sum w*phi**2``.

    Returns zero gain and coefficient when the atom has no weighted
    support.
    """
    w = mask.weights
    den = float(np.sum(w * phi * phi))
    if den <= 0.0:
        return ProjectionGain(basis_index, 0.0, 0.0)
    num = float(np.sum(w * residual * phi))
    coeff = num / den
    return ProjectionGain(basis_index, num * coeff, coeff)


class _GainScanner:
    """Vectorised per-candidate gains for one (basis, mask) pair.

    ``sum w*r*phi`` over every candidate is read off the 2D FFT of
    ``w*r`` (real part for cosines, negated imaginary part for sines);
    the fixed denominators ``sum w*phi**2`` come from the FFT of ``w``
    via the double-angle identity.  Both agree with the direct sums to
    machine precision.
    """

    def __init__(self, basis: BasisSet, mask: WeightMask):
        self.basis = basis
        self.weights = mask.weights
        total = float(np.sum(mask.weights))
        spectrum = np.fft.fft2(mask.weights).ravel()
        sign = np.where(basis.is_sine, -1.0, 1.0)
        den = 0.5 * (total + sign * spectrum.real[basis.dflat])
        den = np.maximum(den, 0.0)
        usable = den > _NORM_FLOOR * max(total, np.finfo(np.float64).tiny)
        self.inv_den = np.where(usable, 1.0, 0.0) / np.where(usable, den, 1.0)

    def gains(self, residual: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(delta_e, coeff) arrays over all candidates for a residual."""
        spectrum = np.fft.fft2(self.weights * residual).ravel()
        num = np.where(
            self.basis.is_sine,
            -spectrum.imag[self.basis.flat],
            spectrum.real[self.basis.flat],
        )
        coeff = num * self.inv_den
        return num * coeff, coeff


# Scanner cache: masks repeat across blocks (interior blocks share one
# pattern), so key on the exact weight bytes.
_scanner_cache: dict[tuple[int, int, bytes], _GainScanner] = {}


def _scanner(basis: BasisSet, mask: WeightMask) -> _GainScanner:
    key = (basis.rows, basis.cols, mask.weights.tobytes())
    scanner = _scanner_cache.get(key)
    if scanner is None:
        if len(_scanner_cache) >= 64:
            _scanner_cache.clear()
        scanner = _GainScanner(basis, mask)
        _scanner_cache[key] = scanner
    return scanner


def _cholesky_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        dc = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    except scipy.linalg.LinAlgError:
        return None
    return dc if np.all(np.isfinite(dc)) else None


def _solve_gram(gram: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, bool]:
    """Solve ``gram @ dc = rhs`` (gram symmetric PSD).

    A Cholesky failure marks the system numerically singular; it is
    retried once with a small ridge on the diagonal, and as a last
    resort falls back to least squares so a block never aborts.
    """
    dc = _cholesky_solve(gram, rhs)
    if dc is not None:
        return dc, False
    ridge = _RIDGE * float(np.trace(gram)) / gram.shape[0]
    regularised = gram + ridge * np.eye(gram.shape[0])
    dc = _cholesky_solve(regularised, rhs)
    if dc is not None:
        return dc, True
    return np.linalg.lstsq(regularised, rhs, rcond=None)[0], True


def solve_coefficient_update(
    residual: np.ndarray,
    mask: WeightMask,
    basis: BasisSet,
    selected: tuple[int, ...] | list[int],
) -> tuple[np.ndarray, bool]:
    """Joint coefficient update over a selected atom subset.

    Solves the weighted normal equations ``G dc = b`` with
    ``G[k, u] = sum w*phi_k*phi_u`` and ``b[k] = sum w*r*phi_k``; the
    solution minimises the weighted error over the selected span.
    Returns ``(dc, degenerate)`` where ``degenerate`` reports whether the
    Gram system needed regularisation.
    """
    if len(selected) == 0:
        raise ValueError("selected atom set must be non-empty")
    atoms = basis.atoms(selected)
    wflat = mask.weights.ravel()
    weighted = atoms * wflat
    gram = weighted @ atoms.T
    rhs = weighted @ residual.ravel()
    return _solve_gram(gram, rhs)


def _residual_energy(weights: np.ndarray, residual: np.ndarray) -> float:
    return float(np.sum(weights * residual * residual))


def fsa_refine(
    patch: Patch,
    mask: WeightMask,
    basis: BasisSet,
    config: EngineConfig = FSA_DEFAULT,
    trace: list[IterationStats] | None = None,
) -> SparseModel:
    """Plain greedy refinement: one projection-coefficient atom per
    iteration, accumulating on re-selection."""
    _check_shapes(patch, mask, basis)
    scanner = _scanner(basis, mask)
    residual = patch.values.astype(np.float64, copy=True)
    order: list[int] = []
    amounts: dict[int, float] = {}
    iterations = 0
    for _ in range(config.max_iterations):
        delta, coeff = scanner.gains(residual)
        best = int(np.argmax(delta))
        if delta[best] <= config.stop_energy:
            break
        c = float(coeff[best])
        residual -= c * basis.atom(best)
        if best in amounts:
            amounts[best] += c
        else:
            order.append(best)
            amounts[best] = c
        iterations += 1
        if trace is not None:
            trace.append(
                IterationStats(
                    (best,), (float(delta[best]),), _residual_energy(mask.weights, residual)
                )
            )
    return SparseModel(tuple(order), tuple(amounts[k] for k in order), iterations)


def ba_refine(
    patch: Patch,
    mask: WeightMask,
    basis: BasisSet,
    config: EngineConfig = BA_DEFAULT,
    trace: list[IterationStats] | None = None,
) -> SparseModel:
    """Orthogonal greedy refinement: argmax selection plus a joint
    coefficient solve over all selected atoms each iteration."""
    return _orthogonal_refine(patch, mask, basis, config, tau=1.0, cap=1, trace=trace)


def rba_refine(
    patch: Patch,
    mask: WeightMask,
    basis: BasisSet,
    config: EngineConfig = RBA_DEFAULT,
    trace: list[IterationStats] | None = None,
) -> SparseModel:
    """Relaxed orthogonal greedy refinement: per iteration admit every
    candidate within ``tau`` of the best gain (largest first, capped),
    then solve once jointly."""
    return _orthogonal_refine(
        patch, mask, basis, config, tau=config.tau, cap=config.max_per_iteration, trace=trace
    )


def _orthogonal_refine(
    patch: Patch,
    mask: WeightMask,
    basis: BasisSet,
    config: EngineConfig,
    tau: float,
    cap: int,
    trace: list[IterationStats] | None,
) -> SparseModel:
    _check_shapes(patch, mask, basis)
    scanner = _scanner(basis, mask)
    wflat = mask.weights.ravel()
    residual = patch.values.astype(np.float64, copy=True)

    # Buffers sized for the worst-case selection; only the leading n
    # rows/columns are live.  The Gram matrix grows by bordered blocks,
    # never recomputing old inner products.
    capacity = min(config.max_iterations * cap, basis.size)
    samples = basis.rows * basis.cols
    atoms = np.empty((capacity, samples), dtype=np.float64)
    weighted_atoms = np.empty((capacity, samples), dtype=np.float64)
    gram = np.empty((capacity, capacity), dtype=np.float64)

    order: list[int] = []
    selected_mask = np.zeros(basis.size, dtype=bool)
    coeffs = np.zeros(capacity, dtype=np.float64)
    n = 0
    iterations = 0

    for _ in range(config.max_iterations):
        delta, _ = scanner.gains(residual)
        fresh = _relaxed_select(delta, selected_mask, tau, cap, config.stop_energy)
        if fresh.size == 0:
            break

        grown = n + fresh.size
        atoms[n:grown] = basis.atoms(fresh)
        weighted_atoms[n:grown] = atoms[n:grown] * wflat
        cross = weighted_atoms[n:grown] @ atoms[:n].T
        gram[n:grown, :n] = cross
        gram[:n, n:grown] = cross.T
        gram[n:grown, n:grown] = weighted_atoms[n:grown] @ atoms[n:grown].T
        selected_mask[fresh] = True
        order.extend(int(k) for k in fresh)
        n = grown

        rhs = weighted_atoms[:n] @ residual.ravel()
        dc, degenerate = _solve_gram(gram[:n, :n], rhs)
        coeffs[:n] += dc
        residual -= (dc @ atoms[:n]).reshape(basis.rows, basis.cols)
        iterations += 1
        if trace is not None:
            trace.append(
                IterationStats(
                    tuple(int(k) for k in fresh),
                    tuple(float(delta[k]) for k in fresh),
                    _residual_energy(mask.weights, residual),
                    degenerate,
                )
            )

    return SparseModel(tuple(order), tuple(coeffs[:n]), iterations)


def _relaxed_select(
    delta: np.ndarray, selected_mask: np.ndarray, tau: float, cap: int, stop_energy: float
) -> np.ndarray:
    """Indices passing the relaxation threshold, largest gains first
    (capped), returned in ascending index order."""
    gains = np.where(selected_mask, -1.0, delta)
    best = float(gains.max())
    if best <= stop_energy:
        return np.empty(0, dtype=np.intp)
    passing = np.nonzero((gains >= tau * best) & (gains > stop_energy))[0]
    if passing.size > cap:
        # Stable sort keeps the low-frequency-first order among ties.
        top = np.argsort(-gains[passing], kind="stable")[:cap]
        passing = np.sort(passing[top])
    return passing


def extract_predictor(
    model: SparseModel, basis: BasisSet, geometry: PatchGeometry
) -> np.ndarray:
    """Model samples over the target block, clipped to [0, 255] and
    rounded to 8-bit precision."""
    grid = evaluate_model(model, basis, geometry)
    block = grid[geometry.target_slices]
    return np.clip(np.rint(block), 0, 255).astype(np.uint8)


def _check_shapes(patch: Patch, mask: WeightMask, basis: BasisSet) -> None:
    shape = (basis.rows, basis.cols)
    if patch.values.shape != shape:
        raise ValueError(f"patch shape {patch.values.shape} != basis {shape}")
    if mask.shape != shape:
        raise ValueError(f"mask shape {mask.shape} != basis {shape}")
