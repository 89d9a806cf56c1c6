"""Place colour-code blocks on the lattice and build the concatenated code.

Layout
    Blocks sit in vertical columns.  Even-indexed columns hold the block in
    its drawn orientation (vertical side on the left, "odd" deformation in
    the 1-based column labels of the drawings); odd-indexed columns hold it
    rotated by 180 degrees and shifted up by ``shift`` rows.  A column pair
    is ``period_x`` sites wide and every column has period ``d`` in y.  With
    the width-minimising shift, each pair leaves exactly ``(d-1)/2``
    padding sites per period, i.e. ``(d-1)/4`` per block.

Images
    Every plaquette and logical image is computed once per shape in a small
    periodic workspace lattice, reduced against nearby vertex stabilizers,
    and then translated into place.  Equal shapes therefore get identical
    images up to translation, whatever their position on the torus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import fqmap, gf2
from .colorblock import ColorCodeBlock, build_block
from .lattice import Lattice
from .majorana import MajoranaMonomial, anticommutation_matrix
from .pauli import (
    PauliOperator,
    SearchBudget,
    format_check_matrix,
    min_weight_in_coset,
    parse_check_matrix,
    stack,
    syndrome,
)

__all__ = [
    "AssemblyError",
    "LayoutSpec",
    "Staggering",
    "staggering",
    "Embedding",
    "embed_block",
    "layout_blocks",
    "padding_stabilizers",
    "LocalOperator",
    "PlaquetteImage",
    "LogicalImage",
    "ConcatenatedCode",
    "CodeParameters",
    "assemble",
    "stack_3d",
    "export_bundle",
    "import_bundle",
]


class AssemblyError(RuntimeError):
    """An assembled object violates a code invariant."""


# -- layout ------------------------------------------------------------------


@dataclass(frozen=True)
class LayoutSpec:
    """Block grid and code parameters.

    ``grid`` is (rows, columns[, layers]); block id (x, y[, z]) is row x,
    column y, layer z.  ``occupied`` lists the block ids actually present
    (default: all); empty slots become padding.  ``first_column`` picks the
    deformation of column 0.
    """

    d_Ff: int
    grid: tuple[int, ...] = (1, 2)
    d_fq: int | None = None
    occupied: tuple[tuple[int, ...], ...] | None = None
    first_column: str = "odd"

    def __post_init__(self):
        grid = tuple(int(g) for g in self.grid)
        object.__setattr__(self, "grid", grid)
        if self.d_fq is None:
            object.__setattr__(self, "d_fq", 2 if len(grid) == 2 else 3)
        if self.occupied is not None:
            object.__setattr__(self, "occupied", tuple(tuple(int(c) for c in b) for b in self.occupied))
        errors = self.validate()
        if errors:
            raise ValueError("; ".join(errors))

    def validate(self) -> list[str]:
        errs = []
        d = self.d_Ff
        if not isinstance(d, (int, np.integer)) or d < 3 or d % 2 == 0:
            errs.append("d_Ff must be odd ≥ 3")
        if len(self.grid) not in (2, 3) or min(self.grid) < 1:
            errs.append("grid must be (rows, columns[, layers]) of positive counts")
        elif self.grid[1] % 2:
            errs.append("the staggered layout needs an even number of columns")
        if len(self.grid) == 2 and self.d_fq != 2:
            errs.append("2D layouts use the d_fq=2 table")
        if len(self.grid) == 3 and self.d_fq != 3:
            errs.append("3D requires the d_fq=3 table")
        if self.first_column not in ("odd", "even"):
            errs.append("first_column must be 'odd' or 'even'")
        if self.occupied is not None and not errs:
            for b in self.occupied:
                if len(b) != len(self.grid) or any(not 0 <= c < g for c, g in zip(b, self.grid)):
                    errs.append(f"occupied block {b} outside the grid")
        return errs

    @property
    def dim(self) -> int:
        return len(self.grid)

    @property
    def block_ids(self) -> list[tuple[int, ...]]:
        every = [tuple(int(c) for c in b) for b in np.ndindex(*self.grid)]
        if self.occupied is None:
            return every
        keep = set(self.occupied)
        return [b for b in every if b in keep]


@dataclass(frozen=True)
class Staggering:
    height: int
    period_x: int
    shift: int
    width: int
    row_widths: tuple[int, ...]


@lru_cache(maxsize=None)
def staggering(d: int) -> Staggering:
    """Narrowest column pair: minimise the widest row of block + rotated block."""
    block = build_block(d)
    h = max(y for _, y in block.coords) + 1
    widths = [0] * h
    for x, y in block.coords:
        widths[y] = max(widths[y], x + 1)
        if x + 1 > sum(1 for _, yy in block.coords if yy == y):
            raise AssemblyError("block rows are not left-aligned")
    best = None
    for s in range(h):
        px = max(widths[k] + widths[(s - k) % h] for k in range(h))
        if best is None or px < best[0]:
            best = (px, s)
    return Staggering(h, best[0], best[1], max(widths), tuple(widths))


def _variant(spec: LayoutSpec, col: int) -> str:
    first_odd = spec.first_column == "odd"
    return "odd" if (col % 2 == 0) == first_odd else "even"


def _anchor(spec: LayoutSpec, bid: Sequence[int]) -> tuple[int, ...]:
    """Unwrapped origin of a block frame; ids may run past the grid."""
    st = staggering(spec.d_Ff)
    row, col = bid[0], bid[1]
    c = col + (0 if spec.first_column == "odd" else 1)
    pair = c // 2
    if c % 2 == 0:
        x, y = pair * st.period_x, row * st.height
    else:
        x = pair * st.period_x + st.period_x - st.width
        y = row * st.height + st.shift - st.height + 1
    if spec.first_column == "even":
        x -= st.period_x - st.width
        y -= st.shift - st.height + 1
    return (x, y) + tuple(bid[2:])


def _shape(block: ColorCodeBlock, variant: str, dim: int) -> list[tuple[int, ...]]:
    st = staggering(block.d)
    out = []
    for x, y in block.coords:
        if variant == "even":
            x, y = st.width - 1 - x, st.height - 1 - y
        out.append((x, y) + (0,) * (dim - 2))
    return out


def lattice_for(spec: LayoutSpec) -> Lattice:
    st = staggering(spec.d_Ff)
    rows, cols = spec.grid[0], spec.grid[1]
    sizes = ((cols // 2) * st.period_x, rows * st.height) + tuple(spec.grid[2:])
    return Lattice(sizes)


@dataclass(frozen=True)
class Embedding:
    """Where one block sits: unwrapped coordinates and lattice vertex indices."""

    block_id: tuple[int, ...]
    variant: str
    anchor: tuple[int, ...]
    coords: tuple[tuple[int, ...], ...]
    vertices: tuple[int, ...]


def embed_block(block: ColorCodeBlock, anchor: Sequence[int], variant: str, lat: Lattice,
                block_id: tuple[int, ...] = ()) -> Embedding:
    if variant not in ("odd", "even"):
        raise ValueError(f"unknown deformation variant {variant!r}")
    shape = _shape(block, variant, lat.dim)
    coords = tuple(tuple(a + c for a, c in zip(anchor, s)) for s in shape)
    if not lat.periodic and not all(lat.in_range(c) for c in coords):
        raise AssemblyError("block does not fit on the open lattice")
    verts = tuple(lat.vertex_index(c) for c in coords)
    if len(set(verts)) != len(verts):
        raise AssemblyError(f"block {block_id} overlaps itself on a lattice of size {lat.sizes}")
    return Embedding(tuple(block_id), variant, tuple(anchor), coords, verts)


def layout_blocks(spec: LayoutSpec, lat: Lattice | None = None):
    """Embeddings for all occupied slots and the sorted padding vertex list."""
    lat = lat or lattice_for(spec)
    block = build_block(spec.d_Ff)
    embs = []
    used: dict[int, tuple] = {}
    for bid in spec.block_ids:
        e = embed_block(block, _anchor(spec, bid), _variant(spec, bid[1]), lat, bid)
        for v in e.vertices:
            if v in used:
                raise AssemblyError(f"blocks {used[v]} and {bid} overlap at vertex {lat.vertex_coords(v)}")
            used[v] = bid
        embs.append(e)
    padding = [v for v in range(lat.n_vertices) if v not in used]
    return embs, padding


def padding_stabilizers(padding: Iterable[int], table: fqmap.MappingTable) -> list[PauliOperator]:
    lat = table.lattice
    return [table.image(lat.vertex_coords(v), "occ") for v in padding]


# -- images computed in a workspace -------------------------------------------


@dataclass(frozen=True)
class LocalOperator:
    """A Pauli operator written in unwrapped coordinates relative to an origin.

    ``terms`` holds (direction, base vertex, x bit, z bit), sorted.
    """

    terms: tuple[tuple[int, tuple[int, ...], int, int], ...]

    @property
    def weight(self) -> int:
        return len(self.terms)

    def place(self, origin: Sequence[int], lat: Lattice) -> PauliOperator:
        x = np.zeros(lat.n_qubits, dtype=np.uint8)
        z = np.zeros(lat.n_qubits, dtype=np.uint8)
        for d, v, xb, zb in self.terms:
            e = lat.edge_index(d, tuple(o + c for o, c in zip(origin, v)))
            x[e] ^= xb
            z[e] ^= zb
        return PauliOperator(x, z)

    def canonical(self) -> tuple:
        """Terms shifted so the smallest base vertex is at the origin."""
        if not self.terms:
            return ()
        low = tuple(min(t[1][a] for t in self.terms) for a in range(len(self.terms[0][1])))
        return tuple(sorted((d, tuple(c - l for c, l in zip(v, low)), xb, zb) for d, v, xb, zb in self.terms))

    def diameter(self) -> int:
        if not self.terms:
            return 0
        pts = np.array([t[1] for t in self.terms])
        return int((pts.max(axis=0) - pts.min(axis=0)).max()) + 1


_MARGIN = 4


@lru_cache(maxsize=64)
def _workspace(dim: int, extent: tuple[int, ...]) -> fqmap.MappingTable:
    sizes = tuple(e + 2 * _MARGIN for e in extent[:2])
    if dim == 3:
        sizes = sizes + (extent[2] + 2 * _MARGIN,)
    return fqmap.MappingTable(Lattice(sizes))


def _nearby_stabilizers(table: fqmap.MappingTable, op: PauliOperator, planes) -> list[PauliOperator]:
    lat = table.lattice
    seen = set()
    out = []
    sup = op.x | op.z
    for q in op.support:
        _, v = lat.edge_coords(int(q))
        for off in np.ndindex(*(5,) * lat.dim):
            w = lat.wrap(tuple(c + o - 2 for c, o in zip(v, off)))
            if w in seen:
                continue
            seen.add(w)
            for p, g in zip(fqmap._planes(lat.dim), table.stabilizers_at(w)):
                if p in planes and (g.x | g.z)[sup.astype(bool)].any():
                    out.append(g)
    return out


def local_image(
    g_coords: Sequence[Sequence[int]],
    gt_coords: Sequence[Sequence[int]],
    dim: int,
    planes=None,
    budget: SearchBudget = SearchBudget(),
    reduce: bool = True,
) -> tuple[LocalOperator, LocalOperator]:
    """(raw, reduced) images of a monomial given by unwrapped coordinates.

    ``planes`` limits which vertex-stabilizer planes may be used for the
    weight reduction (default: all).
    """
    pts = [tuple(c) for c in list(g_coords) + list(gt_coords)]
    if not pts:
        return LocalOperator(()), LocalOperator(())
    low = tuple(min(p[a] for p in pts) for a in range(dim))
    high = tuple(max(p[a] for p in pts) for a in range(dim))
    extent = tuple(h - l + 1 for h, l in zip(high, low))
    table = _workspace(dim, extent)
    shift = tuple(_MARGIN - l for l in low)

    def move(cs):
        return [tuple(c + s for c, s in zip(p, shift)) for p in cs]

    factors = fqmap.decompose_coords(move(g_coords), move(gt_coords))
    raw = fqmap.image_of_factors(factors, table)
    planes = tuple(fqmap._planes(dim)) if planes is None else tuple(planes)
    red = raw
    if reduce:
        red = min_weight_in_coset(raw, _nearby_stabilizers(table, raw, planes), budget)

    def to_local(op: PauliOperator) -> LocalOperator:
        terms = []
        for q in op.support:
            d, v = table.lattice.edge_coords(int(q))
            terms.append((d, tuple(c - s for c, s in zip(v, shift)), int(op.x[q]), int(op.z[q])))
        return LocalOperator(tuple(sorted(terms)))

    return to_local(raw), to_local(red)


# -- the assembled code ---------------------------------------------------------


@dataclass(frozen=True)
class PlaquetteImage:
    block: int
    plaquette: int
    tilde: bool
    variant: str
    local: LocalOperator
    raw_weight: int


@dataclass(frozen=True)
class LogicalImage:
    """A logical hop (``kind='T'``) or occupation (``kind='W'``).

    ``source``/``target`` index into the code's block list; ``sides`` are the
    block sides carrying gamma^L and gamma~^L.
    """

    name: str
    kind: str
    direction: str
    source: int
    target: int
    sides: tuple[int, int]
    local: LocalOperator
    op: PauliOperator = field(repr=False, compare=False)


@dataclass(frozen=True)
class CodeParameters:
    d_fq: int
    d_Ff: int
    N_F: int
    n_qubits: int
    d_Fq_lower: int | None = None
    d_Fq_upper: int | None = None

    @property
    def rate(self) -> float:
        return self.N_F / self.n_qubits


@dataclass(eq=False)
class ConcatenatedCode:
    spec: LayoutSpec
    lattice: Lattice
    table: fqmap.MappingTable
    block: ColorCodeBlock
    embeddings: list[Embedding]
    padding: list[int]
    g_stabilizers: list[PauliOperator]
    padding_stabilizers: list[PauliOperator]
    plaquette_stabilizers: list[PauliOperator]
    plaquette_info: list[PlaquetteImage]
    logicals: list[LogicalImage]

    @property
    def N_F(self) -> int:
        return len(self.embeddings)

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_qubits

    @property
    def d_fq(self) -> int:
        return self.spec.d_fq

    @property
    def d_Ff(self) -> int:
        return self.spec.d_Ff

    @property
    def stabilizers(self) -> list[PauliOperator]:
        return self.g_stabilizers + self.padding_stabilizers + self.plaquette_stabilizers

    @cached_property
    def stabilizer_matrix(self) -> np.ndarray:
        return stack(self.stabilizers, self.n_qubits)

    @cached_property
    def stabilizer_space(self) -> gf2.RowSpace:
        return gf2.RowSpace(self.stabilizer_matrix)

    @property
    def rank(self) -> int:
        return self.stabilizer_space.rank

    @property
    def n_logical_qubits(self) -> int:
        return self.n_qubits - self.rank

    def block_index(self, bid: Sequence[int]) -> int:
        return self._block_lookup[tuple(bid)]

    @cached_property
    def _block_lookup(self) -> dict[tuple[int, ...], int]:
        return {e.block_id: i for i, e in enumerate(self.embeddings)}

    def logical(self, name: str) -> LogicalImage:
        for lg in self.logicals:
            if lg.name == name:
                return lg
        raise KeyError(name)

    def logical_monomial(self, lg: LogicalImage) -> MajoranaMonomial:
        """Abstract monomial over the N_F logical modes."""
        return MajoranaMonomial.from_sparse(self.N_F, g=[lg.source], gt=[lg.target])

    def parameters(self) -> CodeParameters:
        return CodeParameters(self.d_fq, self.d_Ff, self.N_F, self.n_qubits)

    def block_majorana(self, b: int, bits: Sequence[int], tilde: bool = False) -> MajoranaMonomial:
        """Lattice monomial of gamma (or gamma~) on the given block vertices."""
        verts = [self.embeddings[b].vertices[v] for v in bits]
        nv = self.lattice.n_vertices
        return MajoranaMonomial.from_sparse(nv, gt=verts) if tilde else MajoranaMonomial.from_sparse(nv, g=verts)


def _neighbors(spec: LayoutSpec):
    """(direction, source id, unwrapped target id, wrapped target id)."""
    out = []
    for bid in spec.block_ids:
        steps = [("right", 1), ("up", 0)] + ([("back", 2)] if spec.dim == 3 else [])
        for name, axis in steps:
            t = list(bid)
            t[axis] += 1
            wrapped = list(t)
            wrapped[axis] %= spec.grid[axis]
            out.append((name, bid, tuple(t), tuple(wrapped)))
    return out


def _planes_for(dim: int):
    # in 3D, in-layer objects reduce with the in-plane stabilizers only so
    # their X support stays on the layer
    return ((0, 1),) if dim == 3 else None


def assemble(spec: LayoutSpec, budget: SearchBudget = SearchBudget(), check: bool = True) -> ConcatenatedCode:
    """Build every stabilizer and logical image of the layout."""
    lat = lattice_for(spec)
    table = fqmap.MappingTable(lat)
    block = build_block(spec.d_Ff)
    embs, padding = layout_blocks(spec, lat)
    dim = spec.dim
    in_layer = _planes_for(dim)

    plaq_ops, plaq_info = [], []
    cache: dict = {}
    for bi, e in enumerate(embs):
        shape = _shape(block, e.variant, dim)
        for pi, p in enumerate(block.plaquettes):
            for tilde in (False, True):
                key = ("plaq", e.variant, pi, tilde)
                if key not in cache:
                    pts = [shape[v] for v in p]
                    raw, red = local_image([] if tilde else pts, pts if tilde else [], dim, in_layer, budget)
                    cache[key] = (raw.weight, red)
                raw_w, red = cache[key]
                plaq_ops.append(red.place(e.anchor, lat))
                plaq_info.append(PlaquetteImage(bi, pi, tilde, e.variant, red, raw_w))

    logicals = []
    lookup = {e.block_id: i for i, e in enumerate(embs)}
    for bi, e in enumerate(embs):
        key = ("W", e.variant)
        if key not in cache:
            shape = _shape(block, e.variant, dim)
            best = None
            for side in range(3):
                pts = [shape[v] for v in block.sides[side]]
                _, red = local_image(pts, pts, dim, in_layer, budget)
                if best is None or red.weight < best[1].weight:
                    best = ((side, side), red)
            cache[key] = best
        sides, red = cache[key]
        logicals.append(LogicalImage(f"W{e.block_id}", "W", "occ", bi, bi, sides, red, red.place(e.anchor, lat)))

    for direction, src, tgt_unwrapped, tgt in _neighbors(spec):
        if tgt not in lookup or tgt == src:
            continue
        s_i, t_i = lookup[src], lookup[tgt]
        es, et = embs[s_i], embs[t_i]
        key = ("T", direction, es.variant)
        if key not in cache:
            offset = tuple(a - b for a, b in zip(_anchor(spec, tgt_unwrapped), es.anchor))
            s_shape = _shape(block, es.variant, dim)
            t_shape = [tuple(o + c for o, c in zip(offset, p)) for p in _shape(block, et.variant, dim)]
            planes = None if direction == "back" else in_layer
            best = None
            for i in range(3):
                for j in range(3):
                    g_pts = [s_shape[v] for v in block.sides[i]]
                    t_pts = [t_shape[v] for v in block.sides[j]]
                    _, red = local_image(g_pts, t_pts, dim, planes, budget)
                    if best is None or red.weight < best[1].weight:
                        best = ((i, j), red)
            cache[key] = best
        sides, red = cache[key]
        name = f"T{direction}{src}->{tgt}"
        logicals.append(LogicalImage(name, "T", direction, s_i, t_i, sides, red, red.place(es.anchor, lat)))

    g_stabs = table.stabilizers
    code = ConcatenatedCode(
        spec=spec,
        lattice=lat,
        table=table,
        block=block,
        embeddings=embs,
        padding=padding,
        g_stabilizers=g_stabs,
        padding_stabilizers=padding_stabilizers(padding, table),
        plaquette_stabilizers=plaq_ops,
        plaquette_info=plaq_info,
        logicals=logicals,
    )
    if check:
        _check_invariants(code)
    return code


def stack_3d(spec: LayoutSpec, budget: SearchBudget = SearchBudget(), check: bool = True) -> ConcatenatedCode:
    """Layers of the 2D layout along z, with hop-back logicals between layers."""
    if spec.dim != 3:
        raise ValueError("stack_3d needs a (rows, columns, layers) grid")
    return assemble(spec, budget, check)


def _check_invariants(code: ConcatenatedCode) -> None:
    s = code.stabilizer_matrix
    bad = np.argwhere(syndrome(s, s))
    if bad.size:
        i, j = bad[0]
        raise AssemblyError(f"stabilizers {i} and {j} anticommute")
    if code.logicals:
        lm = stack([lg.op for lg in code.logicals])
        bad = np.argwhere(syndrome(lm, s))
        if bad.size:
            i, j = bad[0]
            raise AssemblyError(f"logical {code.logicals[i].name} anticommutes with stabilizer {j}")
        pa = syndrome(lm, lm)
        ma = anticommutation_matrix(np.stack([code.logical_monomial(lg).bits for lg in code.logicals]))
        bad = np.argwhere(pa != ma)
        if bad.size:
            i, j = bad[0]
            raise AssemblyError(
                f"logicals {code.logicals[i].name} and {code.logicals[j].name} break the fermionic algebra"
            )


# -- bundle export ------------------------------------------------------------


def export_bundle(code: ConcatenatedCode) -> str:
    """JSON bundle: parameters, check matrix text, logical images, layout table."""
    spec = code.spec
    header = {
        "d_fq": code.d_fq,
        "d_Ff": code.d_Ff,
        "N_F": code.N_F,
        "n_qubits": code.n_qubits,
        "lattice": list(code.lattice.sizes),
        "grid": list(spec.grid),
        "first_column": spec.first_column,
        "occupied": [list(b) for b in spec.occupied] if spec.occupied is not None else None,
    }
    data = {
        "header": header,
        "stabilizers": format_check_matrix(code.stabilizers, code.n_qubits),
        "stabilizer_groups": {
            "G": len(code.g_stabilizers),
            "padding": len(code.padding_stabilizers),
            "plaquette": len(code.plaquette_stabilizers),
        },
        "logicals": [
            {"name": lg.name, "kind": lg.kind, "direction": lg.direction, "source": lg.source,
             "target": lg.target, "op": lg.op.to_line()}
            for lg in code.logicals
        ],
        "layout": [
            {"block": list(e.block_id), "anchor": [int(c) for c in code.lattice.wrap(e.anchor)],
             "variant": e.variant}
            for e in code.embeddings
        ],
        "padding": [int(p) for p in code.padding],
    }
    return json.dumps(data, indent=1, sort_keys=True)


@dataclass
class CodeBundle:
    header: dict
    stabilizers: list[PauliOperator]
    stabilizer_groups: dict
    logicals: list[dict]
    layout: list[dict]
    padding: list[int]

    def spec(self) -> LayoutSpec:
        h = self.header
        occ = tuple(tuple(b) for b in h["occupied"]) if h["occupied"] is not None else None
        return LayoutSpec(h["d_Ff"], tuple(h["grid"]), h["d_fq"], occ, h["first_column"])


def import_bundle(text: str) -> CodeBundle:
    data = json.loads(text)
    n, stabs = parse_check_matrix(data["stabilizers"])
    if n != data["header"]["n_qubits"]:
        raise ValueError("check matrix size disagrees with header")
    logicals = []
    for lg in data["logicals"]:
        _, (op,) = parse_check_matrix(f"nqubits={n}\n{lg['op']}")
        logicals.append({**lg, "op": op})
    return CodeBundle(data["header"], stabs, data["stabilizer_groups"], logicals, data["layout"], data["padding"])


def bundle_to_text(bundle: CodeBundle) -> str:
    """Serialise an imported bundle back to the export format."""
    data = {
        "header": bundle.header,
        "stabilizers": format_check_matrix(bundle.stabilizers, bundle.header["n_qubits"]),
        "stabilizer_groups": bundle.stabilizer_groups,
        "logicals": [{**lg, "op": lg["op"].to_line()} for lg in bundle.logicals],
        "layout": bundle.layout,
        "padding": bundle.padding,
    }
    return json.dumps(data, indent=1, sort_keys=True)
