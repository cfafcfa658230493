"""Real two-dimensional trigonometric basis.

The candidate dictionary is the real form of the 2D DFT family on an
``M x N`` grid: for every frequency pair ``(p, q)`` taken from one
half-plane of the frequency grid there is a cosine atom
``cos(2*pi*(p*m/M + q*n/N))`` and, unless the pair is self-conjugate
(``2p % M == 0 and 2q % N == 0``, where the sine vanishes identically),
a matching sine atom.  That yields exactly ``M * N`` real atoms spanning
the same signal space as the complex DFT while keeping all expansion
coefficients real.

Atoms are ordered low-frequency first: by wrapped frequency magnitude
``pe**2 + qe**2`` (``pe = min(p, M - p)``), then ``pe``, ``qe``, cosine
before sine, then raw ``(p, q)``.  Greedy selection uses "first index
wins" on ties, so this ordering doubles as the deterministic tie-break.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_TWO_PI = 2.0 * np.pi


class BasisSet:
    """Indexed family of real trigonometric atoms on a fixed grid.

    Atom grids are materialised lazily and cached; across blocks the same
    ``BasisSet`` instance is shared via :func:`basis_for_shape`.
    """

    def __init__(self, rows: int, cols: int):
        if rows < 1 or cols < 1:
            raise ValueError("grid dimensions must be positive")
        self.rows = rows
        self.cols = cols
        entries = _enumerate_entries(rows, cols)
        self.p = np.array([e[0] for e in entries], dtype=np.intp)
        self.q = np.array([e[1] for e in entries], dtype=np.intp)
        self.is_sine = np.array([e[2] for e in entries], dtype=bool)
        # Flat indices into an (rows, cols) spectrum for the atom's own
        # frequency and for its doubled frequency (used by squared-atom sums).
        self.flat = self.p * cols + self.q
        self.dflat = ((2 * self.p) % rows) * cols + (2 * self.q) % cols
        for arr in (self.p, self.q, self.is_sine, self.flat, self.dflat):
            arr.setflags(write=False)
        self._atom_cache: dict[int, np.ndarray] = {}

    @property
    def size(self) -> int:
        return self.p.shape[0]

    def frequency(self, index: int) -> tuple[int, int, bool]:
        """(p, q, is_sine) of one atom."""
        return int(self.p[index]), int(self.q[index]), bool(self.is_sine[index])

    def atom(self, index: int) -> np.ndarray:
        """Sample grid of one atom, shape (rows, cols), read-only."""
        cached = self._atom_cache.get(index)
        if cached is None:
            self._materialise([int(index)])
            cached = self._atom_cache[int(index)]
        return cached

    def atoms(self, indices) -> np.ndarray:
        """Stacked flattened atoms, shape (len(indices), rows * cols)."""
        wanted = [int(k) for k in indices]
        missing = [k for k in wanted if k not in self._atom_cache]
        if missing:
            self._materialise(missing)
        out = np.empty((len(wanted), self.rows * self.cols), dtype=np.float64)
        for row, k in enumerate(wanted):
            out[row] = self._atom_cache[k].ravel()
        return out

    def _materialise(self, indices: list[int]) -> None:
        """Batch-evaluate the trig grids of uncached atoms."""
        for k in indices:
            if not 0 <= k < self.size:
                raise ValueError(f"basis index {k} out of range [0, {self.size})")
        ks = np.array(indices, dtype=np.intp)
        phase = _TWO_PI * (
            (self.p[ks, None, None] / self.rows)
            * np.arange(self.rows, dtype=np.float64)[None, :, None]
            + (self.q[ks, None, None] / self.cols)
            * np.arange(self.cols, dtype=np.float64)[None, None, :]
        )
        sine_rows = self.is_sine[ks]
        grids = np.empty_like(phase)
        if np.any(~sine_rows):
            grids[~sine_rows] = np.cos(phase[~sine_rows])
        if np.any(sine_rows):
            grids[sine_rows] = np.sin(phase[sine_rows])
        for row, k in enumerate(indices):
            grid = grids[row]
            grid.setflags(write=False)
            self._atom_cache[k] = grid


def _enumerate_entries(rows: int, cols: int) -> list[tuple[int, int, bool]]:
    """One (p, q, is_sine) entry per real degree of freedom, sorted
    low-frequency first."""
    entries: list[tuple[int, int, bool]] = []
    seen: set[tuple[int, int]] = set()
    for p in range(rows):
        for q in range(cols):
            conj = ((rows - p) % rows, (cols - q) % cols)
            if (p, q) in seen or conj in seen:
                continue
            seen.add((p, q))
            entries.append((p, q, False))
            if conj != (p, q):
                entries.append((p, q, True))

    def key(entry: tuple[int, int, bool]):
        p, q, is_sine = entry
        pe, qe = min(p, rows - p), min(q, cols - q)
        return (pe * pe + qe * qe, pe, qe, is_sine, p, q)

    entries.sort(key=key)
    return entries


@lru_cache(maxsize=16)
def basis_for_shape(rows: int, cols: int) -> BasisSet:
    """Shared BasisSet instance for a grid shape."""
    return BasisSet(rows, cols)
