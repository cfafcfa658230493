"""Video ingestion: Y4M, headerless raw YUV 4:2:0, and PGM directories.

Only the luma plane drives encoding; chroma planes are retained verbatim
so a read/write cycle of raw material is byte-identical.  Parse errors
carry the byte offset (and frame index where it applies) of the
offending data.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class VideoFormatError(ValueError):
    """Malformed or unsupported video data."""


@dataclass(frozen=True)
class Sequence:
    """Decoded frames: luma always, 4:2:0 chroma when the source had it."""

    width: int
    height: int
    luma: tuple[np.ndarray, ...]
    chroma: tuple[tuple[np.ndarray, np.ndarray], ...] | None = None

    def __len__(self) -> int:
        return len(self.luma)


def _check_dimensions(width: int, height: int) -> None:
    if width <= 0 or height <= 0:
        raise VideoFormatError(f"invalid frame size {width}x{height}")
    if width % 2 or height % 2:
        raise VideoFormatError(f"4:2:0 needs even dimensions, got {width}x{height}")


def read_yuv(path: str | Path, width: int, height: int) -> Sequence:
    """Read headerless planar YUV 4:2:0 with caller-supplied geometry."""
    _check_dimensions(width, height)
    data = Path(path).read_bytes()
    luma_size = width * height
    chroma_size = luma_size // 4
    frame_size = luma_size + 2 * chroma_size
    if len(data) < frame_size:
        raise VideoFormatError(
            f"{path}: need {frame_size} bytes per frame, file has {len(data)}"
        )
    if len(data) % frame_size:
        frame_index = len(data) // frame_size
        raise VideoFormatError(
            f"{path}: truncated frame {frame_index} at byte offset "
            f"{frame_index * frame_size} ({len(data) % frame_size} trailing bytes)"
        )
    lumas, chromas = [], []
    for offset in range(0, len(data), frame_size):
        y, cb, cr = _split_planes(data, offset, width, height)
        lumas.append(y)
        chromas.append((cb, cr))
    return Sequence(width, height, tuple(lumas), tuple(chromas))


def _split_planes(
    data: bytes, offset: int, width: int, height: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    luma_size = width * height
    chroma_size = luma_size // 4
    y = np.frombuffer(data, np.uint8, luma_size, offset).reshape(height, width)
    cb = np.frombuffer(data, np.uint8, chroma_size, offset + luma_size).reshape(
        height // 2, width // 2
    )
    cr = np.frombuffer(
        data, np.uint8, chroma_size, offset + luma_size + chroma_size
    ).reshape(height // 2, width // 2)
    return y.copy(), cb.copy(), cr.copy()


_Y4M_420_TAGS = {"420", "420jpeg", "420mpeg2", "420paldv"}


def read_y4m(path: str | Path) -> Sequence:
    """Read a YUV4MPEG2 stream (4:2:0 subsampling only)."""
    data = Path(path).read_bytes()
    newline = data.find(b"\n")
    if not data.startswith(b"YUV4MPEG2") or newline < 0:
        raise VideoFormatError(f"{path}: missing YUV4MPEG2 signature at byte offset 0")
    width = height = 0
    for token in data[9:newline].split(b" "):
        if not token:
            continue
        kind, value = token[:1], token[1:].decode("ascii", "replace")
        if kind == b"W":
            width = int(value)
        elif kind == b"H":
            height = int(value)
        elif kind == b"C" and value not in _Y4M_420_TAGS:
            raise VideoFormatError(
                f"{path}: unsupported chroma format C{value} in header (byte offset 9)"
            )
    if width == 0 or height == 0:
        raise VideoFormatError(f"{path}: header misses W or H tag (bytes 0..{newline})")
    _check_dimensions(width, height)

    frame_size = width * height * 3 // 2
    offset = newline + 1
    lumas, chromas = [], []
    while offset < len(data):
        marker_end = data.find(b"\n", offset)
        if not data.startswith(b"FRAME", offset) or marker_end < 0:
            raise VideoFormatError(
                f"{path}: frame {len(lumas)} has no FRAME marker at byte offset {offset}"
            )
        payload = marker_end + 1
        if payload + frame_size > len(data):
            raise VideoFormatError(
                f"{path}: truncated frame {len(lumas)} at byte offset {payload}: "
                f"need {frame_size} bytes, have {len(data) - payload}"
            )
        y, cb, cr = _split_planes(data, payload, width, height)
        lumas.append(y)
        chromas.append((cb, cr))
        offset = payload + frame_size
    if not lumas:
        raise VideoFormatError(f"{path}: stream contains no frames")
    return Sequence(width, height, tuple(lumas), tuple(chromas))


_PGM_HEADER = re.compile(
    rb"^P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s"
)


def read_pgm(path: str | Path) -> np.ndarray:
    """Read one binary (P5) PGM image with maxval <= 255."""
    data = Path(path).read_bytes()
    match = _PGM_HEADER.match(data)
    if match is None:
        raise VideoFormatError(f"{path}: not a binary PGM (P5) header at byte offset 0")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval > 255 or maxval <= 0:
        raise VideoFormatError(f"{path}: unsupported maxval {maxval} (need 1..255)")
    pixels = match.end()
    if len(data) - pixels < width * height:
        raise VideoFormatError(
            f"{path}: truncated raster at byte offset {pixels}: "
            f"need {width * height} bytes, have {len(data) - pixels}"
        )
    return (
        np.frombuffer(data, np.uint8, width * height, pixels)
        .reshape(height, width)
        .copy()
    )


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    header = f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode()
    Path(path).write_bytes(header + image.astype(np.uint8).tobytes())


def read_pgm_dir(path: str | Path) -> Sequence:
    """Read every ``*.pgm`` in a directory (sorted by name) as luma-only
    frames."""
    files = sorted(Path(path).glob("*.pgm"))
    if not files:
        raise VideoFormatError(f"{path}: directory contains no .pgm frames")
    lumas = [read_pgm(f) for f in files]
    height, width = lumas[0].shape
    for f, img in zip(files, lumas):
        if img.shape != (height, width):
            raise VideoFormatError(
                f"{f}: frame size {img.shape[1]}x{img.shape[0]} differs from "
                f"first frame {width}x{height}"
            )
    return Sequence(width, height, tuple(lumas), None)


def read_sequence(
    path: str | Path, width: int | None = None, height: int | None = None
) -> Sequence:
    """Dispatch on the path: directory -> PGM frames, ``.y4m`` -> Y4M,
    anything else -> raw YUV 4:2:0 (which requires ``width``/``height``)."""
    p = Path(path)
    if p.is_dir():
        return read_pgm_dir(p)
    if p.suffix.lower() == ".y4m":
        return read_y4m(p)
    if not width or not height:
        raise VideoFormatError(
            f"{path}: raw YUV input needs explicit --width and --height"
        )
    return read_yuv(p, width, height)


def _neutral_chroma(seq: Sequence) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    gray = np.full((seq.height // 2, seq.width // 2), 128, dtype=np.uint8)
    return tuple((gray, gray) for _ in seq.luma)


def write_yuv(path: str | Path, seq: Sequence) -> None:
    """Write headerless planar YUV 4:2:0 (gray chroma if the sequence
    has none)."""
    chroma = seq.chroma if seq.chroma is not None else _neutral_chroma(seq)
    with open(path, "wb") as sink:
        for y, (cb, cr) in zip(seq.luma, chroma):
            sink.write(y.astype(np.uint8).tobytes())
            sink.write(cb.astype(np.uint8).tobytes())
            sink.write(cr.astype(np.uint8).tobytes())


def write_y4m(path: str | Path, seq: Sequence, fps: int = 30) -> None:
    """Write a YUV4MPEG2 4:2:0 stream."""
    chroma = seq.chroma if seq.chroma is not None else _neutral_chroma(seq)
    with open(path, "wb") as sink:
        sink.write(f"YUV4MPEG2 W{seq.width} H{seq.height} F{fps}:1 Ip A1:1 C420\n".encode())
        for y, (cb, cr) in zip(seq.luma, chroma):
            sink.write(b"FRAME\n")
            sink.write(y.astype(np.uint8).tobytes())
            sink.write(cb.astype(np.uint8).tobytes())
            sink.write(cr.astype(np.uint8).tobytes())
