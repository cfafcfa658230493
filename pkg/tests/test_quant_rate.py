"""Residual quantization and the bit-cost proxy."""

import numpy as np
import pytest

from specrefine.codec.motion import MotionVector
from specrefine.codec.quant import dequantize_reconstruct, quantize_and_reconstruct
from specrefine.codec.rate import entropy_bits, exp_golomb_signed_bits, rate_proxy

from .oracles import entropy_histogram


def test_unit_step_integer_residual_is_lossless():
    rng = np.random.default_rng(41)
    pred = rng.integers(0, 256, (16, 16)).astype(np.uint8)
    orig = rng.integers(0, 256, (16, 16)).astype(np.uint8)
    symbols, recon = quantize_and_reconstruct(pred, orig, 1.0)
    np.testing.assert_array_equal(recon, orig)
    np.testing.assert_array_equal(
        symbols, orig.astype(np.int32) - pred.astype(np.int32)
    )


def test_zero_residual_gives_zero_symbols():
    rng = np.random.default_rng(42)
    pred = rng.integers(0, 256, (8, 8)).astype(np.uint8)
    symbols, recon = quantize_and_reconstruct(pred, pred, 4.0)
    assert np.all(symbols == 0)
    np.testing.assert_array_equal(recon, pred)


def test_dequantized_residual_within_half_step():
    rng = np.random.default_rng(43)
    pred = rng.integers(0, 256, (32, 32)).astype(np.uint8)
    orig = rng.integers(0, 256, (32, 32)).astype(np.uint8)
    for qstep in (2.0, 5.0, 16.0):
        symbols, _ = quantize_and_reconstruct(pred, orig, qstep)
        residual = orig.astype(np.float64) - pred.astype(np.float64)
        assert np.max(np.abs(symbols * qstep - residual)) <= qstep / 2 + 1e-9


def test_reconstruction_is_prediction_plus_dequantized_residual():
    rng = np.random.default_rng(44)
    pred = rng.integers(0, 256, (8, 8)).astype(np.uint8)
    orig = rng.integers(0, 256, (8, 8)).astype(np.uint8)
    symbols, recon = quantize_and_reconstruct(pred, orig, 6.0)
    np.testing.assert_array_equal(recon, dequantize_reconstruct(pred, symbols, 6.0))
    assert recon.dtype == np.uint8


def test_qstep_validation():
    block = np.zeros((4, 4), dtype=np.uint8)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            quantize_and_reconstruct(block, block, bad)
        with pytest.raises(ValueError):
            dequantize_reconstruct(block, block.astype(np.int32), bad)
    with pytest.raises(ValueError):
        quantize_and_reconstruct(block, np.zeros((5, 5), np.uint8), 1.0)


def test_entropy_matches_histogram_oracle():
    rng = np.random.default_rng(45)
    symbols = rng.integers(-12, 13, 4000).astype(np.int32)
    assert entropy_bits(symbols) == pytest.approx(entropy_histogram(symbols), rel=1e-12)


def test_entropy_edge_cases():
    assert entropy_bits(np.empty(0, dtype=np.int32)) == 0.0
    assert entropy_bits(np.zeros(500, dtype=np.int32)) == 0.0
    # Two symbols, half-half: exactly one bit each.
    half = np.array([0] * 512 + [1] * 512, dtype=np.int32)
    assert entropy_bits(half) == pytest.approx(1024.0, rel=1e-12)


def test_exp_golomb_signed_lengths():
    known = {0: 1, 1: 3, -1: 3, 2: 5, -2: 5, 3: 5, -3: 5, -4: 7, 4: 7, 7: 7, 8: 9, -16: 11}
    for value, bits in known.items():
        assert exp_golomb_signed_bits(value) == bits, value


def test_rate_proxy_composition():
    symbols = np.zeros((16, 16), dtype=np.int32)
    mvs = [MotionVector(0, 0)] * 4
    # All-zero symbols cost nothing; 4 zero MVs cost 2 bits each; flags
    # add one bit per macroblock when enabled.
    assert rate_proxy(symbols, mvs, 4, count_flags=True) == pytest.approx(4 + 8)
    assert rate_proxy(symbols, mvs, 4, count_flags=False) == pytest.approx(8)


def test_rate_proxy_flag_term_scales_linearly():
    symbols = np.zeros(10, dtype=np.int32)
    base = rate_proxy(symbols, [], 0, count_flags=True)
    for count in (1, 10, 99):
        assert rate_proxy(symbols, [], count, count_flags=True) == base + count


def test_rate_proxy_counts_both_mv_components():
    symbols = np.zeros(4, dtype=np.int32)
    bits = rate_proxy(symbols, [MotionVector(3, -1)], 0, count_flags=False)
    assert bits == exp_golomb_signed_bits(3) + exp_golomb_signed_bits(-1)
