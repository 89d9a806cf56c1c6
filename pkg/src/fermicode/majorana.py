"""Even fermionic algebra as Majorana monomials.

Each vertex carries two Majoranas, gamma and gamma-tilde.  A monomial is a
pair of bit vectors; factor order and signs are not tracked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "MajoranaMonomial",
    "m_multiply",
    "m_anticommutes",
    "is_even",
    "anticommutation_matrix",
]


def _bits(a) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=np.uint8) & 1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MajoranaMonomial:
    g: np.ndarray
    gt: np.ndarray

    def __post_init__(self):
        g, gt = _bits(self.g), _bits(self.gt)
        if g.shape != gt.shape or g.ndim != 1:
            raise ValueError("gamma and gamma-tilde vectors must have equal length")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "gt", gt)

    @classmethod
    def identity(cls, n: int) -> "MajoranaMonomial":
        zero = np.zeros(n, dtype=np.uint8)
        return cls(zero, zero)

    @classmethod
    def from_sparse(cls, n: int, g: Iterable[int] = (), gt: Iterable[int] = ()):
        gb = np.zeros(n, dtype=np.uint8)
        tb = np.zeros(n, dtype=np.uint8)
        for v in g:
            gb[v] ^= 1
        for v in gt:
            tb[v] ^= 1
        return cls(gb, tb)

    @classmethod
    def hop(cls, n: int, a: int, b: int) -> "MajoranaMonomial":
        """i gamma_a gamma-tilde_b."""
        return cls.from_sparse(n, g=[a], gt=[b])

    @classmethod
    def occupation(cls, n: int, a: int) -> "MajoranaMonomial":
        """-i gamma_a gamma-tilde_a."""
        return cls.from_sparse(n, g=[a], gt=[a])

    @property
    def n_vertices(self) -> int:
        return int(self.g.shape[0])

    @property
    def degree(self) -> int:
        return int(self.g.sum()) + int(self.gt.sum())

    @property
    def bits(self) -> np.ndarray:
        return np.concatenate([self.g, self.gt])

    def is_identity(self) -> bool:
        return not (self.g.any() or self.gt.any())

    def __mul__(self, other: "MajoranaMonomial") -> "MajoranaMonomial":
        return m_multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MajoranaMonomial):
            return NotImplemented
        return np.array_equal(self.g, other.g) and np.array_equal(self.gt, other.gt)

    def __hash__(self) -> int:
        return hash((self.g.tobytes(), self.gt.tobytes()))

    def __repr__(self) -> str:
        parts = [f"g{v}" for v in np.flatnonzero(self.g)]
        parts += [f"gt{v}" for v in np.flatnonzero(self.gt)]
        return f"MajoranaMonomial({' '.join(parts) or '1'})"


def _check(a: MajoranaMonomial, b: MajoranaMonomial) -> None:
    if a.n_vertices != b.n_vertices:
        raise ValueError(f"dimension mismatch: {a.n_vertices} vs {b.n_vertices} vertices")


def m_multiply(a: MajoranaMonomial, b: MajoranaMonomial) -> MajoranaMonomial:
    _check(a, b)
    return MajoranaMonomial(a.g ^ b.g, a.gt ^ b.gt)


def m_anticommutes(a: MajoranaMonomial, b: MajoranaMonomial) -> bool:
    """Moving b past a costs |a|*|b| swaps, minus one per shared factor."""
    _check(a, b)
    shared = int(np.count_nonzero(a.g & b.g)) + int(np.count_nonzero(a.gt & b.gt))
    return (a.degree * b.degree - shared) % 2 == 1


def is_even(a: MajoranaMonomial) -> bool:
    return a.degree % 2 == 0


def anticommutation_matrix(bits: np.ndarray) -> np.ndarray:
    """Pairwise anticommutation of monomials given as rows ``[g | gt]``."""
    m = np.asarray(bits, dtype=np.int64)
    deg = m.sum(axis=1)
    return ((np.outer(deg, deg) - m @ m.T) & 1).astype(np.uint8)
