"""Bit-cost proxy for encoded frames.

Actual entropy coding is out of scope; the proxy charges each frame

* the zero-order entropy of its quantized residual symbols,
* the signed exp-Golomb code length of each motion-vector component, and
* one flag bit per macroblock (refined / not refined) when the encoder
  runs a refinement engine.

The proxy is deterministic and monotone in the symbol statistics, which
is all the rate-distortion comparisons need.
"""

from __future__ import annotations

from collections import Counter
from math import floor, log2
from typing import Iterable

import numpy as np

from .motion import MotionVector


def entropy_bits(symbols: np.ndarray) -> float:
    """Zero-order entropy of a symbol array, in bits.

    ``sum_s n_s * log2(T / n_s)`` over the distinct symbol values; an
    empty array costs zero bits, as does one with a single distinct
    value (an ideal coder spends nothing on a known-constant stream).
    """
    if symbols.size == 0:
        return 0.0
    _, counts = np.unique(symbols, return_counts=True)
    total = float(symbols.size)
    return float(np.sum(counts * (np.log2(total) - np.log2(counts))))


def exp_golomb_signed_bits(value: int) -> int:
    """Code length of a signed exponential-Golomb codeword.

    Signed values map to unsigned as 0 -> 0, v > 0 -> 2v - 1,
    v < 0 -> -2v before the order-0 exp-Golomb length
    ``2*floor(log2(u + 1)) + 1``.
    """
    u = 2 * value - 1 if value > 0 else -2 * value
    return 2 * floor(log2(u + 1)) + 1


def rate_proxy(
    symbols: np.ndarray,
    motion_vectors: Iterable[MotionVector],
    n_macroblocks: int,
    count_flags: bool,
) -> float:
    """Total proxy bits for one frame."""
    bits = entropy_bits(symbols)
    for mv in motion_vectors:
        bits += exp_golomb_signed_bits(mv.dy) + exp_golomb_signed_bits(mv.dx)
    if count_flags:
        bits += float(n_macroblocks)
    return bits


def symbol_histogram(symbols: np.ndarray) -> Counter:
    """Convenience histogram of quantized symbols (used in reports)."""
    return Counter(symbols.ravel().tolist())
