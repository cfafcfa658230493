"""Block-based hybrid codec harness built around the refinement engines."""

from .motion import MotionVector, motion_search
from .quant import dequantize_reconstruct, quantize_and_reconstruct
from .rate import entropy_bits, exp_golomb_signed_bits, rate_proxy
from .metrics import RDPoint, bd_metrics, psnr
from .encoder import (
    CodecParams,
    EncodedFrame,
    EncodedSequence,
    EncodeOutcome,
    FrameStats,
    QstepResult,
    decode_sequence,
    encode_sequence,
    mode_decide,
    refine_block,
)

__all__ = [
    "CodecParams",
    "EncodedFrame",
    "EncodedSequence",
    "EncodeOutcome",
    "FrameStats",
    "MotionVector",
    "QstepResult",
    "RDPoint",
    "bd_metrics",
    "decode_sequence",
    "dequantize_reconstruct",
    "encode_sequence",
    "entropy_bits",
    "exp_golomb_signed_bits",
    "mode_decide",
    "motion_search",
    "psnr",
    "quantize_and_reconstruct",
    "rate_proxy",
    "refine_block",
]
