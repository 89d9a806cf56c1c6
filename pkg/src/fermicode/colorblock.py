"""Triangular fermionic colour-code blocks.

The block is cut from a honeycomb drawn in brick-wall form, where every
hexagon is a 2x3 rectangle of square-lattice vertices.  The cut is an
equilateral triangle whose left side is vertical and runs through hexagon
centres, so that side becomes a straight column of the square lattice and
the other two sides are staircases.  Plaquettes are the hexagons keeping at
least four vertices: full hexagons inside, squares along the vertical side
and L-shapes along the staircases.

Vertices are numbered row-major from the top row down, left to right, which
for d = 5 gives the sides {1,3,8,15,19}, {14,13,18,17,19}, {1,2,6,7,14}.
Internally indices are 0-based; ``label(v) = v + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf2
from .majorana import MajoranaMonomial

__all__ = [
    "ColorCodeBlock",
    "build_block",
    "plaquette_stabilizers",
    "logical_pair",
    "side_logical",
    "block_vertex_count",
]

_S3 = math.sqrt(3.0)
# corner angle (degrees) and brick offset from the hexagon's lower-left vertex
_CORNERS = ((90, (1, 1)), (30, (2, 1)), (-30, (2, 0)), (-90, (1, 0)), (-150, (0, 0)), (150, (0, 1)))


def block_vertex_count(d: int) -> int:
    return (3 * d * d + 1) // 4


@dataclass(frozen=True)
class ColorCodeBlock:
    """A distance-``d`` block.

    ``coords[v]`` is vertex v's position in the block's own square-lattice
    frame (+x right, +y up, lower-left at the origin); the assembler places
    and rotates these.  ``sides`` are ordered: vertical side, upper
    staircase, lower staircase.
    """

    d: int
    coords: tuple[tuple[int, int], ...]
    plaquettes: tuple[tuple[int, ...], ...]
    colors: tuple[int, ...]
    sides: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def check_matrix(self) -> np.ndarray:
        """Plaquette-by-vertex incidence matrix (one Majorana type)."""
        h = np.zeros((len(self.plaquettes), self.n_vertices), dtype=np.uint8)
        for i, p in enumerate(self.plaquettes):
            h[i, list(p)] = 1
        return h

    @staticmethod
    def label(v: int) -> int:
        return v + 1


def _honeycomb(radius: int):
    """Brick-wall vertex positions and hexagons of a patch of honeycomb."""
    pos: dict[tuple[int, int], tuple[float, float]] = {}
    hexes = []
    for q in range(-radius, radius):
        for r in range(-radius, radius):
            cx, cy = _S3 * (q + r / 2), 1.5 * r
            ll = (2 * q + r, r)
            corners = []
            for ang, (a, b) in _CORNERS:
                t = math.radians(ang)
                v = (ll[0] + a, ll[1] + b)
                pos[v] = (cx + math.cos(t), cy + math.sin(t))
                corners.append(v)
            hexes.append(((q - r) % 3, frozenset(corners)))
    return pos, hexes


def _inside(p, tri, eps=1e-4) -> bool:
    signs = []
    for (ax, ay), (bx, by) in zip(tri, tri[1:] + tri[:1]):
        signs.append((bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax))
    return not (min(signs) < -eps and max(signs) > eps)


@lru_cache(maxsize=None)
def build_block(d: int) -> ColorCodeBlock:
    """Construct the distance-``d`` block (d odd, at least 3)."""
    if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
        raise ValueError("d_Ff must be odd >= 3")
    d = int(d)
    pos, hexes = _honeycomb(2 * d + 4)
    side = 1.5 * (d - 1)
    y0 = -1.0
    tri = [(0.0, y0), (0.0, y0 + side), (_S3 / 2 * side, y0 + side / 2)]
    region = {v for v, p in pos.items() if _inside(p, tri)}

    plaqs = []
    for color, h in hexes:
        part = h & region
        if len(part) >= 4:
            if len(part) == 5:
                raise RuntimeError("triangle cut produced a 5-vertex plaquette")
            plaqs.append((color, part))

    # mirror top-bottom into the drawn orientation, then normalise
    xs = [v[0] for v in region]
    ys = [v[1] for v in region]
    frame = {v: (v[0] - min(xs), max(ys) - v[1]) for v in region}
    order = sorted(region, key=lambda v: (-frame[v][1], frame[v][0]))
    index = {v: i for i, v in enumerate(order)}

    plaqs.sort(key=lambda cp: sorted(index[v] for v in cp[1]))
    plaquettes = tuple(tuple(sorted(index[v] for v in p)) for _, p in plaqs)
    colors = tuple(c for c, _ in plaqs)

    n = len(order)
    in_color = [set() for _ in range(n)]
    for c, p in zip(colors, plaquettes):
        for v in p:
            in_color[v].add(c)
    sides = []
    for c in range(3):
        s = tuple(v for v in range(n) if len(in_color[v]) < 3 and c not in in_color[v])
        sides.append(s)
    coords = tuple(frame[v] for v in order)
    # vertical side first, then the upper and lower staircases
    left = [s for s in sides if all(coords[v][0] == 0 for v in s)]
    if len(left) != 1:
        raise RuntimeError("could not identify the vertical side")
    rest = sorted((s for s in sides if s is not left[0]), key=lambda s: min(s))
    ordered = (left[0], rest[0], rest[1])
    block = ColorCodeBlock(d, coords, plaquettes, colors, ordered)
    _check_block(block)
    return block


def _check_block(b: ColorCodeBlock) -> None:
    n = b.n_vertices
    if n != block_vertex_count(b.d):
        raise RuntimeError(f"block has {n} vertices, expected {block_vertex_count(b.d)}")
    h = b.check_matrix
    if len(b.plaquettes) != (n - 1) // 2 or gf2.rank(h) != (n - 1) // 2:
        raise RuntimeError("plaquettes are not independent")
    if ((h.astype(np.int64) @ h.T.astype(np.int64)) & 1).any():
        raise RuntimeError("plaquettes are not pairwise even-overlapping")
    for s in b.sides:
        if len(s) != b.d:
            raise RuntimeError(f"side {s} does not have {b.d} vertices")
        if (h[:, list(s)].sum(axis=1) % 2).any():
            raise RuntimeError(f"side {s} is not a logical support")


def plaquette_stabilizers(b: ColorCodeBlock) -> list[MajoranaMonomial]:
    """All-gamma monomials for each plaquette, then all-gamma-tilde ones."""
    n = b.n_vertices
    out = [MajoranaMonomial.from_sparse(n, g=p) for p in b.plaquettes]
    out += [MajoranaMonomial.from_sparse(n, gt=p) for p in b.plaquettes]
    return out


def side_logical(b: ColorCodeBlock, side: int, tilde: bool = False) -> MajoranaMonomial:
    vs = b.sides[side]
    if tilde:
        return MajoranaMonomial.from_sparse(b.n_vertices, gt=vs)
    return MajoranaMonomial.from_sparse(b.n_vertices, g=vs)


def logical_pair(b: ColorCodeBlock, side: int = 0) -> tuple[MajoranaMonomial, MajoranaMonomial]:
    """(gamma^L, gamma-tilde^L) supported on one side, the vertical side by default."""
    return side_logical(b, side), side_logical(b, side, tilde=True)
