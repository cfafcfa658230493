"""Patch geometry for block-wise spatial refinement.

A refinement patch covers a 3x3 arrangement of equally sized blocks
centred on the block being predicted.  The centre block holds the
motion-compensated estimate.  In line-scan coding order exactly four of
the eight neighbour blocks (left, top-left, top, top-right) are already
reconstructed and usable as spatial context; the remaining four have not
been coded yet and carry no information.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np


class Region(IntEnum):
    """Role of a sample inside the patch grid."""

    UNKNOWN = 0
    RECON = 1   # reconstructed causal neighbour
    TARGET = 2  # block being predicted (motion-compensated estimate)


# Causal neighbours of the centre block, as (block_row, block_col) in the
# 3x3 block grid: top-left, top, top-right, left.
_CAUSAL_BLOCKS = ((0, 0), (0, 1), (0, 2), (1, 0))
_TARGET_BLOCK = (1, 1)


@dataclass(frozen=True, eq=False)
class PatchGeometry:
    """Region labelling of one 3x3-block refinement patch.

    The grid is ``M x N`` samples with ``M = 3 * block_height`` and
    ``N = 3 * block_width``.  ``labels`` assigns each sample a
    :class:`Region` value.
    """

    block_height: int
    block_width: int
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.block_height < 1 or self.block_width < 1:
            raise ValueError("block dimensions must be positive")
        expected = (3 * self.block_height, 3 * self.block_width)
        if self.labels.shape != expected:
            raise ValueError(f"labels shape {self.labels.shape} != {expected}")
        self.labels.setflags(write=False)

    @property
    def rows(self) -> int:
        return 3 * self.block_height

    @property
    def cols(self) -> int:
        return 3 * self.block_width

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def target_slices(self) -> tuple[slice, slice]:
        """Row/column slices of the centre block within the patch grid."""
        bh, bw = self.block_height, self.block_width
        return (slice(bh, 2 * bh), slice(bw, 2 * bw))

    def region_mask(self, region: Region) -> np.ndarray:
        return self.labels == int(region)

    def count(self, region: Region) -> int:
        return int(np.count_nonzero(self.labels == int(region)))


@dataclass(frozen=True, eq=False)
class Patch:
    """Sample values over one refinement patch.

    ``values`` holds the reconstructed intensities for RECON samples and
    the motion-compensated estimate for TARGET samples, as real numbers.
    UNKNOWN samples are zero and must never be read.
    """

    geometry: PatchGeometry
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.geometry.shape:
            raise ValueError(
                f"values shape {self.values.shape} != geometry {self.geometry.shape}"
            )
        self.values.setflags(write=False)

    @property
    def target_block(self) -> np.ndarray:
        return self.values[self.geometry.target_slices]


@lru_cache(maxsize=32)
def base_geometry(block_height: int, block_width: int) -> PatchGeometry:
    """Nominal interior geometry: four causal RECON blocks, centre TARGET."""
    labels = np.zeros((3 * block_height, 3 * block_width), dtype=np.uint8)
    for br, bc in _CAUSAL_BLOCKS:
        labels[
            br * block_height : (br + 1) * block_height,
            bc * block_width : (bc + 1) * block_width,
        ] = int(Region.RECON)
    tr, tc = _TARGET_BLOCK
    labels[
        tr * block_height : (tr + 1) * block_height,
        tc * block_width : (tc + 1) * block_width,
    ] = int(Region.TARGET)
    return PatchGeometry(block_height, block_width, labels)


def assemble_patch(
    recon_frame: np.ndarray,
    mc_block: np.ndarray,
    block_position: tuple[int, int],
    geometry: PatchGeometry,
) -> Patch:
    """Build the refinement patch for one block.

    ``recon_frame`` is the reconstruction of the current frame as far as
    it has been coded (causal blocks filled); ``mc_block`` is the
    motion-compensated estimate of the block at ``block_position``
    (top-left corner, row/col frame coordinates).  Nominal RECON samples
    that fall outside the frame are relabelled UNKNOWN.
    """
    bh, bw = geometry.block_height, geometry.block_width
    frame_h, frame_w = recon_frame.shape
    row, col = block_position
    if row % bh != 0 or col % bw != 0:
        raise ValueError(f"block position {block_position} not on the {bh}x{bw} grid")
    if not (0 <= row <= frame_h - bh and 0 <= col <= frame_w - bw):
        raise ValueError(f"block position {block_position} outside the frame")
    if mc_block.shape != (bh, bw):
        raise ValueError(f"mc block shape {mc_block.shape} != ({bh}, {bw})")

    labels = np.asarray(geometry.labels).copy()
    values = np.zeros(geometry.shape, dtype=np.float64)

    # Frame coordinates covered by the patch, clipped to the frame.
    top, left = row - bh, col - bw
    r0, r1 = max(0, -top), min(3 * bh, frame_h - top)
    c0, c1 = max(0, -left), min(3 * bw, frame_w - left)
    inside = np.zeros(geometry.shape, dtype=bool)
    if r0 < r1 and c0 < c1:
        inside[r0:r1, c0:c1] = True
    labels[(labels == int(Region.RECON)) & ~inside] = int(Region.UNKNOWN)

    recon_sel = labels == int(Region.RECON)
    if recon_sel.any():
        window = np.zeros(geometry.shape, dtype=np.float64)
        window[r0:r1, c0:c1] = recon_frame[top + r0 : top + r1, left + c0 : left + c1]
        values[recon_sel] = window[recon_sel]
    tsl = geometry.target_slices
    values[tsl] = mc_block

    return Patch(PatchGeometry(bh, bw, labels), values)
