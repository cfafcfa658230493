"""Hybrid block encoder: motion compensation, optional spatial
refinement of the prediction, mode decision, residual quantization.

The first frame is intra coded trivially (quantized against a zero
prediction); every following frame is a P-frame whose macroblocks are
processed in line-scan order against the previous *reconstructed* frame.
Because refinement reads only reconstructed samples (causal neighbors of
the running frame plus the motion-compensated block), a decoder holding
the motion vectors, mode flags and quantized symbols can replay the
prediction exactly — reconstruction is bit-exact by construction, which
:func:`decode_sequence` verifies in the test suite.

Rate/PSNR accounting covers the P-frames; the intra frame only
bootstraps the reference and is identical across engine settings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..basis import basis_for_shape
from ..engines import (
    EngineConfig,
    ba_refine,
    extract_predictor,
    fsa_refine,
    rba_refine,
)
from ..geometry import Patch, Region, assemble_patch, base_geometry
from ..weights import build_weight_mask
from .metrics import RDPoint
from .motion import MotionVector, motion_search, predict_block
from .quant import dequantize_reconstruct, quantize_and_reconstruct
from .rate import rate_proxy

ENGINES = ("none", "fsa", "ba", "rba")


@dataclass(frozen=True)
class CodecParams:
    """Encoder-side knobs; defaults follow the reference operating point
    (16x16 macroblocks, +/-16 search, rho_hat 0.8, mu 0.5, FSA 200
    iterations, RBA 4 iterations with tau 0.5 and a 20-atom cap)."""

    block_size: int = 16
    search_range: int = 16
    mu: float = 0.5
    rho_hat: float = 0.8
    tau: float = 0.5
    fsa_iterations: int = 200
    ba_iterations: int = 20
    rba_iterations: int = 4
    max_per_iteration: int = 20
    stop_energy: float = 0.0
    fps: float = 30.0

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.fps <= 0:
            raise ValueError("fps must be positive")

    def engine_config(self, engine: str) -> EngineConfig:
        if engine == "fsa":
            return EngineConfig(self.fsa_iterations, stop_energy=self.stop_energy)
        if engine == "ba":
            return EngineConfig(self.ba_iterations, stop_energy=self.stop_energy)
        if engine == "rba":
            return EngineConfig(
                self.rba_iterations,
                tau=self.tau,
                max_per_iteration=self.max_per_iteration,
                stop_energy=self.stop_energy,
            )
        raise ValueError(f"unknown refinement engine {engine!r}")


_REFINERS = {"fsa": fsa_refine, "ba": ba_refine, "rba": rba_refine}


def refine_block(patch: Patch, engine: str, params: CodecParams) -> np.ndarray:
    """Spatially refined predictor for the patch's target block.

    ``engine='none'`` — and any patch without reconstructed neighbors —
    passes the motion-compensated block through unchanged.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown refinement engine {engine!r}")
    mc_block = np.rint(patch.target_block).astype(np.uint8)
    if engine == "none":
        return mc_block
    if not np.any(patch.geometry.labels == Region.RECON):
        return mc_block
    mask = build_weight_mask(patch.geometry, params.mu, params.rho_hat)
    basis = basis_for_shape(*patch.geometry.shape)
    model = _REFINERS[engine](patch, mask, basis, params.engine_config(engine))
    return extract_predictor(model, basis, patch.geometry)


def _sse(a: np.ndarray, b: np.ndarray) -> float:
    diff = a.astype(np.float64) - b.astype(np.float64)
    return float(np.sum(diff * diff))


def mode_decide(
    original_block: np.ndarray, mc_pred: np.ndarray, refined_pred: np.ndarray
) -> tuple[bool, np.ndarray]:
    """Per-macroblock choice between the two predictors.

    Returns ``(refined?, chosen predictor)``; the refined predictor wins
    only on strictly smaller SSE, so a tie keeps the cheaper unrefined
    path.
    """
    if _sse(original_block, refined_pred) < _sse(original_block, mc_pred):
        return True, refined_pred
    return False, mc_pred


@dataclass(frozen=True)
class EncodedFrame:
    """Everything the decoder needs for one frame."""

    intra: bool
    symbols: np.ndarray  # int32, full-frame quantized residual symbols
    mvs: tuple[MotionVector, ...]
    flags: tuple[bool, ...]


@dataclass(frozen=True)
class EncodedSequence:
    """Decodable stream for one (engine, qstep) encode."""

    engine: str
    qstep: float
    params: CodecParams
    height: int
    width: int
    frames: tuple[EncodedFrame, ...]


@dataclass(frozen=True)
class FrameStats:
    """Per-P-frame encoder measurements."""

    frame_index: int
    bits: float
    recon_mse: float
    pred_sse_chosen: float
    pred_sse_mc: float
    refined_blocks: int
    total_blocks: int
    refine_ms: float


@dataclass(frozen=True)
class QstepResult:
    qstep: float
    point: RDPoint
    frame_stats: tuple[FrameStats, ...]
    stream: EncodedSequence
    recon_frames: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class EncodeOutcome:
    """Results of one engine swept over the qstep ladder."""

    engine: str
    results: tuple[QstepResult, ...]

    @property
    def curve(self) -> list[RDPoint]:
        return [r.point for r in self.results]

    def mean_refine_ms(self) -> float:
        """Mean refinement milliseconds per P-frame over the sweep."""
        samples = [s.refine_ms for r in self.results for s in r.frame_stats]
        return float(np.mean(samples)) if samples else 0.0


def _block_grid(height: int, width: int, size: int) -> list[tuple[int, int]]:
    if height % size or width % size:
        raise ValueError(
            f"frame {height}x{width} is not a multiple of the {size}x{size} block size"
        )
    return [(top, left) for top in range(0, height, size) for left in range(0, width, size)]


def encode_sequence(
    frames: list[np.ndarray],
    engine: str,
    qsteps: list[float],
    params: CodecParams = CodecParams(),
) -> EncodeOutcome:
    """Encode the luma frames once per quantizer step.

    Returns the rate-distortion point per qstep (pooled-MSE PSNR over
    the P-frames, proxy kbit/s at ``params.fps``) along with the
    per-frame measurements and the decodable streams.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown refinement engine {engine!r}")
    if len(frames) < 2:
        raise ValueError("need at least 2 frames (one intra + one P-frame)")
    if engine != "none":
        params.engine_config(engine)  # validate knobs up front
    height, width = frames[0].shape
    for i, f in enumerate(frames):
        if f.shape != (height, width):
            raise ValueError(f"frame {i} shape {f.shape} != frame 0 shape {(height, width)}")
    positions = _block_grid(height, width, params.block_size)

    results = []
    for qstep in qsteps:
        results.append(_encode_once(frames, engine, float(qstep), params, positions))
    return EncodeOutcome(engine, tuple(results))


def _encode_once(
    frames: list[np.ndarray],
    engine: str,
    qstep: float,
    params: CodecParams,
    positions: list[tuple[int, int]],
) -> QstepResult:
    height, width = frames[0].shape
    size = params.block_size
    geometry = base_geometry(size, size)
    zero_pred = np.zeros((height, width), dtype=np.uint8)

    intra_symbols, reference = quantize_and_reconstruct(zero_pred, frames[0], qstep)
    coded = [EncodedFrame(True, intra_symbols, (), ())]
    recon_frames = [reference]
    stats: list[FrameStats] = []
    total_bits = 0.0
    mse_sum = 0.0

    for index in range(1, len(frames)):
        original = frames[index]
        recon = np.zeros_like(original)
        symbols = np.zeros((height, width), dtype=np.int32)
        mvs: list[MotionVector] = []
        flags: list[bool] = []
        refine_ns = 0
        sse_chosen = 0.0
        sse_mc_total = 0.0

        for top, left in positions:
            window = (slice(top, top + size), slice(left, left + size))
            cur = original[window]
            mv, mc_block = motion_search(cur, reference, (top, left), params.search_range)
            sse_mc = _sse(cur, mc_block)
            if engine == "none":
                refined_flag, predictor, sse_pick = False, mc_block, sse_mc
            else:
                patch = assemble_patch(recon, mc_block, (top, left), geometry)
                started = time.perf_counter_ns()
                refined = refine_block(patch, engine, params)
                refine_ns += time.perf_counter_ns() - started
                refined_flag, predictor = mode_decide(cur, mc_block, refined)
                sse_pick = _sse(cur, predictor)
            block_symbols, block_recon = quantize_and_reconstruct(predictor, cur, qstep)
            recon[window] = block_recon
            symbols[window] = block_symbols
            mvs.append(mv)
            flags.append(refined_flag)
            sse_chosen += sse_pick
            sse_mc_total += sse_mc

        bits = rate_proxy(symbols, mvs, len(positions), count_flags=engine != "none")
        total_bits += bits
        frame_mse = _sse(original, recon) / original.size
        mse_sum += frame_mse
        stats.append(
            FrameStats(
                frame_index=index,
                bits=bits,
                recon_mse=frame_mse,
                pred_sse_chosen=sse_chosen,
                pred_sse_mc=sse_mc_total,
                refined_blocks=sum(flags),
                total_blocks=len(positions),
                refine_ms=refine_ns / 1e6,
            )
        )
        coded.append(EncodedFrame(False, symbols, tuple(mvs), tuple(flags)))
        recon_frames.append(recon)
        reference = recon

    n_p = len(frames) - 1
    pooled_mse = mse_sum / n_p
    if pooled_mse == 0.0:
        psnr_db = 99.0
    else:
        psnr_db = float(10.0 * np.log10(255.0**2 / pooled_mse))
    rate_kbps = total_bits * params.fps / n_p / 1000.0
    stream = EncodedSequence(engine, qstep, params, height, width, tuple(coded))
    return QstepResult(
        qstep, RDPoint(rate_kbps, psnr_db), tuple(stats), stream, tuple(recon_frames)
    )


def decode_sequence(stream: EncodedSequence) -> list[np.ndarray]:
    """Reconstruct every frame from the coded stream alone.

    Replays motion compensation and (where flagged) the deterministic
    refinement against its own running reconstruction, so the output
    matches the encoder's reconstructed frames bit for bit.
    """
    size = stream.params.block_size
    geometry = base_geometry(size, size)
    positions = _block_grid(stream.height, stream.width, size)
    zero_pred = np.zeros((stream.height, stream.width), dtype=np.uint8)

    recons: list[np.ndarray] = []
    for frame_index, coded in enumerate(stream.frames):
        if coded.intra:
            if frame_index != 0:
                raise ValueError(f"unexpected intra frame at index {frame_index}")
            recons.append(dequantize_reconstruct(zero_pred, coded.symbols, stream.qstep))
            continue
        if not recons:
            raise ValueError("first frame of the stream must be intra")
        reference = recons[-1]
        recon = np.zeros((stream.height, stream.width), dtype=np.uint8)
        for k, (top, left) in enumerate(positions):
            window = (slice(top, top + size), slice(left, left + size))
            mc_block = predict_block(reference, (top, left), (size, size), coded.mvs[k])
            if coded.flags[k]:
                patch = assemble_patch(recon, mc_block, (top, left), geometry)
                predictor = refine_block(patch, stream.engine, stream.params)
            else:
                predictor = mc_block
            recon[window] = dequantize_reconstruct(
                predictor, coded.symbols[window], stream.qstep
            )
        recons.append(recon)
    return recons
