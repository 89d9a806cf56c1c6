"""Square and cubic lattices with fermions on vertices and qubits on edges.

Vertex ``(i, j[, k])`` has linear index ``i + L_x*(j + L_y*k)``.  Edge
``(d, v)`` joins ``v`` and ``v + e_d`` and has index ``dim*index(v) + d``,
with directions 0, 1, 2 = x, y, z.  Orientation: +x right, +y up, +z into
the page.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .pauli import PauliOperator

__all__ = ["Lattice", "AXES", "unit", "translate"]

AXES = "xyz"


def unit(d: int, dim: int) -> tuple[int, ...]:
    return tuple(1 if a == d else 0 for a in range(dim))


def _add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(p + q for p, q in zip(a, b))


@dataclass(frozen=True)
class Lattice:
    sizes: tuple[int, ...]
    periodic: bool = True

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) not in (2, 3) or min(sizes) < 1:
            raise ValueError(f"need 2 or 3 positive sizes, got {self.sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def dim(self) -> int:
        return len(self.sizes)

    @property
    def n_vertices(self) -> int:
        return int(np.prod(self.sizes))

    @property
    def n_qubits(self) -> int:
        """Size of the edge index space (``dim`` slots per vertex)."""
        return self.dim * self.n_vertices

    # -- vertices ---------------------------------------------------------
    def wrap(self, v: Sequence[int]) -> tuple[int, ...]:
        if self.periodic:
            return tuple(int(c) % s for c, s in zip(v, self.sizes))
        if not self.in_range(v):
            raise IndexError(f"vertex {tuple(v)} outside open lattice {self.sizes}")
        return tuple(int(c) for c in v)

    def in_range(self, v: Sequence[int]) -> bool:
        return len(v) == self.dim and all(0 <= c < s for c, s in zip(v, self.sizes))

    def vertex_index(self, v: Sequence[int]) -> int:
        if len(v) != self.dim:
            raise IndexError(f"vertex {tuple(v)} has the wrong dimension")
        w = self.wrap(v)
        idx = 0
        for c, s in zip(reversed(w), reversed(self.sizes)):
            idx = idx * s + c
        return idx

    def vertex_coords(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.n_vertices:
            raise IndexError(f"vertex index {index} out of range")
        out = []
        for s in self.sizes:
            out.append(index % s)
            index //= s
        return tuple(out)

    def vertices(self) -> Iterator[tuple[int, ...]]:
        for idx in range(self.n_vertices):
            yield self.vertex_coords(idx)

    # -- edges ------------------------------------------------------------
    def edge_exists(self, d: int, v: Sequence[int]) -> bool:
        if self.periodic:
            return True
        return self.in_range(v) and v[d] + 1 < self.sizes[d]

    def edge_index(self, d: int, v: Sequence[int]) -> int:
        if not 0 <= d < self.dim:
            raise IndexError(f"direction {d} invalid in {self.dim}D")
        if not self.edge_exists(d, v):
            raise IndexError(f"edge {AXES[d]}{tuple(v)} not present on the open lattice")
        return self.dim * self.vertex_index(v) + d

    def edge_coords(self, index: int) -> tuple[int, tuple[int, ...]]:
        if not 0 <= index < self.n_qubits:
            raise IndexError(f"edge index {index} out of range")
        return index % self.dim, self.vertex_coords(index // self.dim)

    def edge_name(self, index: int) -> str:
        d, v = self.edge_coords(index)
        return f"{AXES[d]}{v}"

    def edges(self) -> Iterator[int]:
        for idx in range(self.n_qubits):
            d, v = self.edge_coords(idx)
            if self.edge_exists(d, v):
                yield idx

    def incident_edges(self, v: Sequence[int]) -> list[int]:
        """Edges at ``v`` in the order +x, -x, +y, -y[, +z, -z]."""
        if not self.in_range(v):
            raise IndexError(f"vertex {tuple(v)} out of range")
        out = []
        for d in range(self.dim):
            back = _add(v, tuple(-c for c in unit(d, self.dim)))
            for base in (tuple(v), back):
                if self.periodic or (self.in_range(base) and self.edge_exists(d, base)):
                    out.append(self.edge_index(d, base))
        return out

    def plaquette_edges(self, v: Sequence[int], plane: tuple[int, int] = (0, 1)) -> list[int]:
        """Edges of the unit square whose top-left corner is ``v``.

        ``plane = (r, u)`` names the in-plane "right" and "up" axes, so the
        square has corners v, v+r, v-u, v+r-u.
        """
        if not self.in_range(v):
            raise IndexError(f"vertex {tuple(v)} out of range")
        r, u = plane
        if r == u or max(r, u) >= self.dim:
            raise ValueError(f"invalid plane {plane} for {self.dim}D")
        er, eu = unit(r, self.dim), unit(u, self.dim)
        low = _add(v, tuple(-c for c in eu))
        return [
            self.edge_index(u, low),
            self.edge_index(r, low),
            self.edge_index(u, _add(low, er)),
            self.edge_index(r, v),
        ]

    def neighbor(self, v: Sequence[int], d: int, sign: int = 1) -> tuple[int, ...]:
        step = tuple(sign * c for c in unit(d, self.dim))
        return self.wrap(_add(v, step))

    def edge_permutation(self, by: Sequence[int]) -> np.ndarray:
        """Index map ``perm[e] = translate(e, by)`` under periodic boundary."""
        if not self.periodic:
            raise ValueError("translation needs a periodic lattice")
        perm = np.empty(self.n_qubits, dtype=np.int64)
        for idx in range(self.n_qubits):
            d, v = self.edge_coords(idx)
            perm[idx] = self.edge_index(d, _add(v, by))
        return perm


def translate(op: PauliOperator, by: Sequence[int], lat: Lattice) -> PauliOperator:
    """Shift an operator's support by a vertex offset."""
    if op.n_qubits != lat.n_qubits:
        raise ValueError("operator does not live on this lattice")
    if lat.periodic:
        perm = lat.edge_permutation(by)
        x = np.zeros_like(op.x)
        z = np.zeros_like(op.z)
        x[perm] = op.x
        z[perm] = op.z
        return PauliOperator(x, z)
    x = np.zeros_like(op.x)
    z = np.zeros_like(op.z)
    for q in op.support:
        d, v = lat.edge_coords(int(q))
        t = lat.edge_index(d, _add(v, by))
        x[t], z[t] = op.x[q], op.z[q]
    return PauliOperator(x, z)
