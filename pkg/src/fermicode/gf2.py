"""Linear algebra over GF(2) on bit-packed numpy arrays.

Matrices are plain ``uint8`` arrays of 0/1 at the API boundary.  Internally
rows are packed into ``uint64`` words so that row operations touch 64 columns
at a time; this keeps elimination on a few thousand columns cheap.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "pack",
    "unpack",
    "popcount",
    "rref",
    "rank",
    "rank_and_solve",
    "nullspace",
    "RowSpace",
]

_WORD = 64


def _nwords(ncols: int) -> int:
    return max(1, (ncols + _WORD - 1) // _WORD)


def pack(m: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix (or vector) into little-endian ``uint64`` words."""
    m = np.asarray(m, dtype=np.uint8)
    squeeze = m.ndim == 1
    if squeeze:
        m = m[None, :]
    rows, cols = m.shape
    nw = _nwords(cols)
    padded = np.zeros((rows, nw * _WORD), dtype=np.uint8)
    padded[:, :cols] = m & 1
    out = np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64)
    return out[0] if squeeze else out


def unpack(p: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack`."""
    p = np.asarray(p, dtype=np.uint64)
    squeeze = p.ndim == 1
    if squeeze:
        p = p[None, :]
    bits = np.unpackbits(p.astype("<u8").view(np.uint8), axis=1, bitorder="little")
    out = bits[:, :ncols].copy()
    return out[0] if squeeze else out


def popcount(p: np.ndarray) -> np.ndarray:
    """Number of set bits along the last axis of a packed array."""
    return np.bitwise_count(np.asarray(p, dtype=np.uint64)).sum(axis=-1).astype(np.int64)


def _column(p: np.ndarray, c: int) -> np.ndarray:
    return ((p[:, c // _WORD] >> np.uint64(c % _WORD)) & np.uint64(1)).astype(bool)


def _eliminate(p: np.ndarray, ncols: int, track: np.ndarray | None = None):
    """In-place Gauss-Jordan elimination on packed rows.

    Returns the pivot column list.  ``track`` (packed) receives the same row
    operations, which is how solutions are recovered.
    """
    rows = p.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        col = _column(p, c)
        hits = np.flatnonzero(col[r:])
        if hits.size == 0:
            continue
        k = r + int(hits[0])
        if k != r:
            p[[r, k]] = p[[k, r]]
            if track is not None:
                track[[r, k]] = track[[k, r]]
            col[[r, k]] = col[[k, r]]
        col[r] = False
        if col.any():
            p[col] ^= p[r]
            if track is not None:
                track[col] ^= track[r]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    >>> r, piv = rref(np.array([[1, 1, 0], [0, 1, 1]]))
    >>> r.tolist(), piv
    ([[1, 0, 1], [0, 1, 1]], [0, 1])
    """
    m = np.asarray(m, dtype=np.uint8)
    if m.size == 0:
        return m.copy(), []
    p = pack(m)
    piv = _eliminate(p, m.shape[1])
    return unpack(p, m.shape[1]), piv


def rank(m: np.ndarray) -> int:
    m = np.asarray(m, dtype=np.uint8)
    if m.size == 0:
        return 0
    return len(_eliminate(pack(m), m.shape[1]))


def rank_and_solve(m: np.ndarray, target: np.ndarray | None = None):
    """Rank of ``m`` and, optionally, coefficients ``c`` with ``c @ m = target``.

    Returns ``(rank, solution)``; ``solution`` is ``None`` when no target is
    given or the target is outside the row space.
    """
    m = np.asarray(m, dtype=np.uint8)
    if target is None:
        return rank(m), None
    space = RowSpace(m)
    return space.rank, space.solve(target)


def nullspace(m: np.ndarray) -> np.ndarray:
    """Basis (as rows) of ``{v : m @ v = 0}``."""
    m = np.asarray(m, dtype=np.uint8)
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(ncols, dtype=np.uint8)
    r, piv = rref(m)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = np.zeros((len(free), ncols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = r[i, f]
    return basis


class RowSpace:
    """Precomputed elimination of a fixed matrix for repeated membership tests.

    The pivot rows and the row-operation record are kept packed, so reducing a
    batch of targets costs one masked XOR per pivot.
    """

    def __init__(self, m: np.ndarray):
        m = np.asarray(m, dtype=np.uint8)
        if m.ndim != 2:
            raise ValueError("expected a 2D matrix")
        self.nrows, self.ncols = m.shape
        p = pack(m) if self.nrows else np.zeros((0, _nwords(self.ncols)), np.uint64)
        track = pack(np.eye(self.nrows, dtype=np.uint8)) if self.nrows else np.zeros((0, 1), np.uint64)
        self.pivots = _eliminate(p, self.ncols, track) if self.nrows else []
        self.rank = len(self.pivots)
        self._rows = p[: self.rank]
        self._track = track[: self.rank]
        self._pivot_words = np.array([c // _WORD for c in self.pivots], dtype=np.int64)
        self._pivot_shifts = np.array([c % _WORD for c in self.pivots], dtype=np.uint64)

    def reduce_packed(self, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Reduce packed targets; return (remainders, packed coefficients)."""
        t = np.array(targets, dtype=np.uint64, copy=True)
        if t.ndim == 1:
            t = t[None, :]
        coeff = np.zeros((t.shape[0], self._track.shape[1] if self.rank else 1), dtype=np.uint64)
        for i in range(self.rank):
            hit = ((t[:, self._pivot_words[i]] >> self._pivot_shifts[i]) & np.uint64(1)).astype(bool)
            if hit.any():
                t[hit] ^= self._rows[i]
                coeff[hit] ^= self._track[i]
        return t, coeff

    def contains(self, v: np.ndarray) -> bool:
        v = np.asarray(v, dtype=np.uint8)
        if v.ndim != 1:
            raise ValueError("contains takes one vector; use contains_many for a batch")
        rem, _ = self.reduce_packed(pack(v)[None, :])
        return not rem.any()

    def contains_many(self, vs: np.ndarray) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.uint8)
        if vs.shape[0] == 0:
            return np.zeros(0, dtype=bool)
        rem, _ = self.reduce_packed(pack(vs))
        return ~rem.any(axis=1)

    def solve(self, v: np.ndarray) -> np.ndarray | None:
        """Coefficients over the original rows, or ``None`` if infeasible."""
        v = np.asarray(v, dtype=np.uint8)
        if v.shape[-1] != self.ncols:
            raise ValueError(f"target length {v.shape[-1]} != {self.ncols} columns")
        rem, coeff = self.reduce_packed(pack(v)[None, :])
        if rem.any():
            return None
        if self.nrows == 0:
            return np.zeros(0, dtype=np.uint8)
        return unpack(coeff[0], self.nrows)
