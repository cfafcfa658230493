"""Uniform scalar residual quantization."""

from __future__ import annotations

import numpy as np


def quantize_and_reconstruct(
    prediction: np.ndarray, original: np.ndarray, qstep: float
) -> tuple[np.ndarray, np.ndarray]:
    """Quantize ``original - prediction`` with a uniform step.

    Returns ``(symbols, reconstruction)`` where symbols are the rounded
    integer quotients (int32) and the reconstruction is the prediction
    plus the dequantized residual, rounded and clipped back to 8-bit
    range.  The reconstruction is exactly reproducible from
    ``(prediction, symbols, qstep)`` via :func:`dequantize_reconstruct`,
    which is what makes the decoder bit-exact.
    """
    if prediction.shape != original.shape:
        raise ValueError(f"shape mismatch: {prediction.shape} vs {original.shape}")
    _check_qstep(qstep)
    residual = original.astype(np.float64) - prediction.astype(np.float64)
    symbols = np.rint(residual / qstep).astype(np.int32)
    return symbols, dequantize_reconstruct(prediction, symbols, qstep)


def dequantize_reconstruct(
    prediction: np.ndarray, symbols: np.ndarray, qstep: float
) -> np.ndarray:
    """Prediction plus dequantized residual, rounded and clipped to
    8-bit range — the one reconstruction formula shared by encoder and
    decoder."""
    _check_qstep(qstep)
    recon = np.clip(np.rint(prediction.astype(np.float64) + symbols * qstep), 0, 255)
    return recon.astype(np.uint8)


def _check_qstep(qstep: float) -> None:
    if qstep <= 0:
        raise ValueError("qstep must be positive")
