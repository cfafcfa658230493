"""Exhaustive integer-pel block motion search.

The search minimises the exact integer SSD between the current block and
every candidate block of the reference frame inside a clamped window.
SSD is expanded as ``sum(cur**2) - 2*corr + sum(ref_window**2)`` and
evaluated in float64; all intermediate values for 8-bit blocks are far
below 2**53, so the arithmetic is exact and ties can be broken
deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass(frozen=True)
class MotionVector:
    """Displacement (dy, dx) into the reference frame, row-major."""

    dy: int
    dx: int


def motion_search(
    current_block: np.ndarray,
    reference: np.ndarray,
    block_position: tuple[int, int],
    search_range: int,
) -> tuple[MotionVector, np.ndarray]:
    """Best integer displacement over a clamped window, plus the block
    it names.

    Every candidate keeps the displaced block fully inside the reference
    frame.  Ties on SSD prefer the smallest ``|dy| + |dx|``, then the
    smaller ``dy``, then the smaller ``dx``, so results do not depend on
    scan order.
    """
    if search_range < 0:
        raise ValueError("search_range must be >= 0")
    bh, bw = current_block.shape
    top, left = block_position
    frame_h, frame_w = reference.shape
    if not (0 <= top and top + bh <= frame_h and 0 <= left and left + bw <= frame_w):
        raise ValueError(f"block at {block_position} exceeds the reference frame")

    dy_lo = max(-search_range, -top)
    dy_hi = min(search_range, frame_h - bh - top)
    dx_lo = max(-search_range, -left)
    dx_hi = min(search_range, frame_w - bw - left)

    window = reference[top + dy_lo : top + dy_hi + bh, left + dx_lo : left + dx_hi + bw]
    window = window.astype(np.float64)
    block = current_block.astype(np.float64)

    # Candidate-block views: shape (n_dy, n_dx, bh, bw).
    views = sliding_window_view(window, (bh, bw))
    corr = views.reshape(views.shape[0], views.shape[1], -1) @ block.ravel()
    ref_sq = sliding_window_view(window * window, (bh, bw)).sum(axis=(2, 3))
    ssd = float(np.sum(block * block)) - 2.0 * corr + ref_sq

    dys = np.arange(dy_lo, dy_hi + 1)
    dxs = np.arange(dx_lo, dx_hi + 1)
    grid_dy = np.repeat(dys, dxs.size)
    grid_dx = np.tile(dxs, dys.size)
    flat_ssd = ssd.ravel()
    # Lexicographic tie-break: SSD, then |dy|+|dx|, then dy, then dx.
    order = np.lexsort((grid_dx, grid_dy, np.abs(grid_dy) + np.abs(grid_dx), flat_ssd))
    pick = order[0]
    mv = MotionVector(int(grid_dy[pick]), int(grid_dx[pick]))
    return mv, predict_block(reference, block_position, (bh, bw), mv)


def predict_block(
    reference: np.ndarray,
    block_position: tuple[int, int],
    shape: tuple[int, int],
    mv: MotionVector,
) -> np.ndarray:
    """Displaced reference block named by a motion vector."""
    top, left = block_position
    bh, bw = shape
    r0, c0 = top + mv.dy, left + mv.dx
    if not (0 <= r0 and r0 + bh <= reference.shape[0] and 0 <= c0 and c0 + bw <= reference.shape[1]):
        raise ValueError(f"motion vector {mv} leaves the reference frame")
    return reference[r0 : r0 + bh, c0 : c0 + bw]
