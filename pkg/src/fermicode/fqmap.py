"""Small-distance fermion-to-qubit layer.

Generators of the even fermionic algebra are hops ``i gamma_a gamma~_b``
along +x/+y(/+z) and occupations ``-i gamma_a gamma~_a``.  Their Pauli
images live on lattice edges:

2D (d_fq = 2)
    hop+y at a: X on y(a), Z on x(a)
    hop+x at a: X on x(a), Z on y(a + x - y)
    occupation: Z on the four incident edges

3D (d_fq = 3)
    The 2D rule is applied in each coordinate plane with (right, up) axes
    (x, y), (y, z), (z, x).  A hop along axis d picks up one Z edge from each
    plane containing d, so every hop has weight 3 and its projection onto any
    coordinate plane is the 2D image of that plane.

Each plane also contributes the vertex stabilizer ``G``: the image of the
six-factor Majorana identity around the unit square below-right of a vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import gf2
from .lattice import Lattice, unit
from .majorana import MajoranaMonomial, anticommutation_matrix
from .pauli import PauliOperator, stack, syndrome

__all__ = [
    "PLANES_2D",
    "PLANES_3D",
    "MappingTable",
    "OutsideAlgebra",
    "build_table",
    "generator_image",
    "derived_hopping",
    "vertex_stabilizers",
    "decompose",
    "decompose_coords",
    "majorana_to_pauli",
    "pauli_to_majorana",
    "validate_homomorphism",
]

PLANES_2D = ((0, 1),)
PLANES_3D = ((0, 1), (1, 2), (2, 0))


def _planes(dim: int):
    return PLANES_2D if dim == 2 else PLANES_3D


def _kinds(dim: int) -> tuple[str, ...]:
    return tuple(f"hop+{'xyz'[d]}" for d in range(dim)) + ("occ",)


def _add(a, b):
    return tuple(p + q for p, q in zip(a, b))


def _sub(a, b):
    return tuple(p - q for p, q in zip(a, b))


def _hop_terms(lat: Lattice, d: int, a) -> tuple[list[int], list[int]]:
    dim = lat.dim
    zs = []
    for r, u in _planes(dim):
        if d == r:
            zs.append(lat.edge_index(u, _sub(_add(a, unit(r, dim)), unit(u, dim))))
        elif d == u:
            zs.append(lat.edge_index(r, a))
    return [lat.edge_index(d, a)], zs


def generator_image(lat: Lattice, v: Sequence[int], kind: str) -> PauliOperator:
    """Pauli image of a generator; ``kind`` is ``hop+x``, ``hop+y``, ``hop+z`` or ``occ``."""
    if not lat.in_range(v):
        raise IndexError(f"vertex {tuple(v)} out of range")
    n = lat.n_qubits
    if kind == "occ":
        return PauliOperator.from_sparse(n, z=lat.incident_edges(v))
    if kind.startswith("hop+") and kind[4:] in "xyz"[: lat.dim] and len(kind) == 5:
        xs, zs = _hop_terms(lat, "xyz".index(kind[4]), v)
        return PauliOperator.from_sparse(n, x=xs, z=zs)
    raise ValueError(f"unknown generator kind {kind!r} in {lat.dim}D")


def _plane_stabilizer(lat: Lattice, plane, dv) -> PauliOperator:
    """G_d = T_dc T_bc T_ad T_ab W_b W_d with d the top-left corner."""
    r, u = plane
    dim = lat.dim
    a = lat.wrap(_sub(dv, unit(u, dim)))
    b = lat.wrap(_add(a, unit(r, dim)))
    hop_r, hop_u = f"hop+{'xyz'[r]}", f"hop+{'xyz'[u]}"
    out = generator_image(lat, dv, hop_r)
    for vv, k in ((b, hop_u), (a, hop_u), (a, hop_r), (b, "occ"), (dv, "occ")):
        out = out * generator_image(lat, vv, k)
    return out


def vertex_stabilizers(lat: Lattice, v: Sequence[int]) -> list[PauliOperator]:
    """The planar G stabilizers at ``v``: one in 2D, three (xy, yz, zx) in 3D."""
    if not lat.in_range(v):
        raise IndexError(f"vertex {tuple(v)} out of range")
    return [_plane_stabilizer(lat, p, tuple(v)) for p in _planes(lat.dim)]


def derived_hopping(lat: Lattice, v: Sequence[int], kind: str) -> PauliOperator:
    """Hop in a negative direction, e.g. ``hop-y`` from v to v - e_y.

    Uses T_{v -> t} = W_v T_{t -> v} W_t with t the target.
    """
    if not (kind.startswith("hop-") and len(kind) == 5 and kind[4] in "xyz"[: lat.dim]):
        raise ValueError(f"not a derived hop: {kind!r}")
    d = "xyz".index(kind[4])
    t = lat.wrap(_sub(v, unit(d, lat.dim)))
    return (
        generator_image(lat, v, "occ")
        * generator_image(lat, t, f"hop+{kind[4]}")
        * generator_image(lat, t, "occ")
    )


@dataclass(frozen=True)
class OutsideAlgebra:
    """Result of pauli_to_majorana for operators outside the fermionic algebra.

    ``reason`` is ``"anticommutes"`` (certificate = G syndrome) or
    ``"nontrivial-cycle"`` (commutes with every G but is not a product of
    generator images; certificate = the reduced remainder).
    """

    reason: str
    certificate: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class MappingTable:
    lattice: Lattice

    @property
    def d_fq(self) -> int:
        return 2 if self.lattice.dim == 2 else 3

    @cached_property
    def kinds(self) -> tuple[str, ...]:
        return _kinds(self.lattice.dim)

    @cached_property
    def keys(self) -> list[tuple[int, str]]:
        return [(vi, k) for vi in range(self.lattice.n_vertices) for k in self.kinds]

    @cached_property
    def images(self) -> dict[tuple[int, str], PauliOperator]:
        return {key: self._image(*key) for key in self.keys}

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        return stack([self.images[k] for k in self.keys])

    @lru_cache(maxsize=None)
    def _image(self, vi: int, kind: str) -> PauliOperator:
        lat = self.lattice
        v = lat.vertex_coords(vi)
        if kind.startswith("hop-"):
            return derived_hopping(lat, v, kind)
        return generator_image(lat, v, kind)

    @cached_property
    def generator_majorana(self) -> np.ndarray:
        nv = self.lattice.n_vertices
        rows = np.zeros((len(self.keys), 2 * nv), dtype=np.uint8)
        for i, (vi, k) in enumerate(self.keys):
            rows[i, vi] = 1
            if k == "occ":
                rows[i, nv + vi] = 1
            else:
                d = "xyz".index(k[4])
                t = self.lattice.vertex_index(
                    _add(self.lattice.vertex_coords(vi), unit(d, self.lattice.dim))
                )
                rows[i, nv + t] = 1
        return rows

    @cached_property
    def stabilizers(self) -> list[PauliOperator]:
        return [g for vi in range(self.lattice.n_vertices) for g in self._stabilizers_at(vi)]

    @cached_property
    def stabilizer_matrix(self) -> np.ndarray:
        return stack(self.stabilizers)

    @cached_property
    def span(self) -> gf2.RowSpace:
        return gf2.RowSpace(self.generator_matrix)

    @cached_property
    def kernel_majorana(self) -> np.ndarray:
        """Majorana content of products of images that equal the identity."""
        ker = gf2.nullspace(self.generator_matrix.T)
        if ker.shape[0] == 0:
            return np.zeros((0, 2 * self.lattice.n_vertices), dtype=np.uint8)
        m = (ker.astype(np.int64) @ self.generator_majorana.astype(np.int64)) & 1
        r, piv = gf2.rref(m.astype(np.uint8))
        return r[: len(piv)]

    def image(self, v: Sequence[int], kind: str) -> PauliOperator:
        return self._image(self.lattice.vertex_index(v), kind)

    def stabilizers_at(self, v: Sequence[int]) -> list[PauliOperator]:
        return self._stabilizers_at(self.lattice.vertex_index(v))

    @lru_cache(maxsize=None)
    def _stabilizers_at(self, vi: int) -> list[PauliOperator]:
        return vertex_stabilizers(self.lattice, self.lattice.vertex_coords(vi))

    def canonical_majorana(self, bits: np.ndarray) -> np.ndarray:
        """Lowest-degree representative modulo the kernel relations."""
        k = self.kernel_majorana
        if k.shape[0] == 0:
            return bits
        if k.shape[0] > 12:
            raise ValueError("kernel too large for canonical representatives")
        best = bits
        for mask in range(1, 1 << k.shape[0]):
            sel = [i for i in range(k.shape[0]) if mask >> i & 1]
            cand = bits ^ np.bitwise_xor.reduce(k[sel], axis=0)
            if (cand.sum(), tuple(cand)) < (best.sum(), tuple(best)):
                best = cand
        return best


def build_table(lat: Lattice) -> MappingTable:
    return MappingTable(lat)


def validate_homomorphism(table: MappingTable) -> tuple[int, tuple | None]:
    """Count generator pairs whose Pauli and Majorana commutation disagree.

    Returns ``(mismatches, first_counterexample_keys)``.
    """
    gm = table.generator_matrix
    pauli_anti = syndrome(gm, gm)
    maj_anti = anticommutation_matrix(table.generator_majorana)
    bad = np.argwhere(pauli_anti != maj_anti)
    if bad.size == 0:
        return 0, None
    i, j = bad[0]
    return int(bad.shape[0]), (table.keys[i], table.keys[j])


# -- Majorana -> Pauli ------------------------------------------------------


def _order_key(c):
    return tuple(reversed(c))


def _pair_greedy(coords: list[tuple[int, ...]]) -> list[tuple[tuple, tuple]]:
    """Walk vertices in (z, y, x) order; pair each with its nearest unpaired one."""
    todo = sorted(coords, key=_order_key)
    pairs = []
    while todo:
        u = todo.pop(0)
        dist = [sum(abs(p - q) for p, q in zip(u, w)) for w in todo]
        j = int(np.argmin(dist))
        pairs.append((u, todo.pop(j)))
    return pairs


def _route(u, w) -> list[tuple[tuple, str]]:
    """Hop factors moving gamma_u to gamma~_w: x first, then y, then z.

    The path u=p0, p1, ..., pk=w gives T_{p0 p1} W_{p1} T_{p1 p2} ... ;
    negative steps use the derived hops.
    """
    out = []
    cur = tuple(u)
    first = True
    for d in range(len(u)):
        step = 1 if w[d] > cur[d] else -1
        while cur[d] != w[d]:
            if not first:
                out.append((cur, "occ"))
            first = False
            out.append((cur, f"hop{'+' if step > 0 else '-'}{'xyz'[d]}"))
            cur = tuple(c + (step if a == d else 0) for a, c in enumerate(cur))
    return out


def decompose_coords(g_coords, gt_coords) -> list[tuple[tuple, str]]:
    """Generator factors for a monomial given by (unwrapped) vertex coordinates.

    Vertices carrying both Majoranas become occupations.  The remaining
    gamma-only and gamma~-only vertices are paired greedily within each type;
    if both types have odd count the leftover gamma and gamma~ form one hop.
    Pairs are routed by ``_route``:  gamma~_u gamma~_w = W_u * path(u, w) and
    gamma_u gamma_w = path(u, w) * W_w.
    """
    g = {tuple(c) for c in g_coords}
    gt = {tuple(c) for c in gt_coords}
    if (len(g) + len(gt)) % 2:
        raise ValueError("odd monomial has no image in the even algebra")
    both = g & gt
    g_only = sorted(g - both, key=_order_key)
    gt_only = sorted(gt - both, key=_order_key)
    factors = [(c, "occ") for c in sorted(both, key=_order_key)]
    mixed = None
    if len(g_only) % 2:
        mixed = (g_only.pop(-1), gt_only.pop(-1))
    for u, w in _pair_greedy(gt_only):
        factors.append((u, "occ"))
        factors.extend(_route(u, w))
    for u, w in _pair_greedy(g_only):
        factors.extend(_route(u, w))
        factors.append((w, "occ"))
    if mixed is not None:
        factors.extend(_route(*mixed))
    return factors


def _unwrap(lat: Lattice, vertices: list[int]) -> list[tuple[int, ...]]:
    """Coordinates of a vertex set unwrapped around its first vertex."""
    coords = [lat.vertex_coords(v) for v in vertices]
    if not coords or not lat.periodic:
        return coords
    ref = min(coords, key=_order_key)
    out = []
    for c in coords:
        shifted = []
        for a, (p, r, s) in enumerate(zip(c, ref, lat.sizes)):
            delta = (p - r) % s
            if delta > s // 2:
                delta -= s
            shifted.append(r + delta)
        out.append(tuple(shifted))
    return out


def decompose(m: MajoranaMonomial, table: MappingTable) -> list[tuple[tuple, str]]:
    lat = table.lattice
    if m.n_vertices != lat.n_vertices:
        raise ValueError("monomial does not live on this lattice")
    gv = [int(v) for v in np.flatnonzero(m.g)]
    tv = [int(v) for v in np.flatnonzero(m.gt)]
    coords = _unwrap(lat, gv + tv)
    return decompose_coords(coords[: len(gv)], coords[len(gv) :])


def image_of_factors(factors, table: MappingTable) -> PauliOperator:
    out = PauliOperator.identity(table.lattice.n_qubits)
    for v, k in factors:
        out = out * table.image(table.lattice.wrap(v), k)
    return out


def majorana_to_pauli(m: MajoranaMonomial, table: MappingTable) -> PauliOperator:
    """Image of an even monomial as the product of its routed generator factors."""
    return image_of_factors(decompose(m, table), table)


# -- Pauli -> Majorana ------------------------------------------------------


def pauli_to_majorana(p: PauliOperator, table: MappingTable):
    """Majorana monomial of a Pauli in the fermionic algebra, else OutsideAlgebra.

    On a closed lattice the product of every occupation image is the identity
    while its Majorana content is the total parity, so the answer is only
    defined up to that relation; the lower-degree representative is returned.
    """
    if p.n_qubits != table.lattice.n_qubits:
        raise ValueError("operator does not live on this lattice")
    syn = syndrome(p.symplectic[None, :], table.stabilizer_matrix)[0]
    if syn.any():
        return OutsideAlgebra("anticommutes", syn)
    coeff = table.span.solve(p.symplectic)
    if coeff is None:
        rem, _ = table.span.reduce_packed(gf2.pack(p.symplectic)[None, :])
        return OutsideAlgebra("nontrivial-cycle", gf2.unpack(rem[0], 2 * p.n_qubits))
    bits = ((coeff.astype(np.int64) @ table.generator_majorana.astype(np.int64)) & 1).astype(np.uint8)
    bits = table.canonical_majorana(bits)
    nv = table.lattice.n_vertices
    return MajoranaMonomial(bits[:nv], bits[nv:])
