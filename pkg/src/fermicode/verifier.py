"""Checks, sector operators, distance and footprint census of assembled codes."""

from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import fqmap, gf2
from .assembler import ConcatenatedCode, LayoutSpec, assemble
from .lattice import Lattice
from .majorana import anticommutation_matrix
from .pauli import PauliOperator, stack, syndrome

__all__ = [
    "Check",
    "VerificationReport",
    "check_code",
    "SectorOperator",
    "sector_generators",
    "logical_basis",
    "DistanceEstimate",
    "estimate_distance",
    "exact_distance_milp",
    "distance_by_enumeration",
    "footprint_census",
    "check_projection",
    "logical_count",
]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    # stable exit-code class: 2 algebra, 3 stabilizers, 4 logicals, 5 sector, 6 accounting
    code: int = 1


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        failed = [c.code for c in self.checks if not c.passed]
        return min(failed) if failed else 0

    def add(self, name: str, passed: bool, detail: str = "", code: int = 1) -> None:
        self.checks.append(Check(name, bool(passed), detail, code))

    def to_json(self) -> str:
        return json.dumps({"ok": self.ok, "summary": self.summary,
                           "checks": [asdict(c) for c in self.checks]}, indent=1)

    def to_text(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail else "")
                 for c in self.checks]
        lines += [f"{k}: {v}" for k, v in self.summary.items()]
        return "\n".join(lines) + "\n"


# -- sector operators -----------------------------------------------------------


@dataclass(frozen=True)
class SectorOperator:
    name: str
    op: PauliOperator
    winding: tuple[int, ...]
    min_side: int


def _x_support(ops: Sequence[PauliOperator], n: int) -> np.ndarray:
    if not ops:
        return np.zeros(n, dtype=bool)
    return np.bitwise_or.reduce([op.x for op in ops], axis=0).astype(bool)


def _dual_loop(lat2: Lattice, blocked: np.ndarray, axis: int) -> list[int] | None:
    """Shortest dual cycle winding once along ``axis`` that avoids blocked edges.

    Dual nodes are plaquette centres labelled by their lower-left vertex.  A
    dual step along +y from (x, y) crosses the x-edge at (x, y+1); a step
    along +x crosses the y-edge at (x+1, y).  States carry the mod-2 winding
    numbers, which is all that matters for Z-type chains.
    """
    lx, ly = lat2.sizes
    best = None
    starts = [(x, 0) for x in range(lx)] if axis == 1 else [(0, y) for y in range(ly)]
    for s in starts:
        start = (s[0], s[1], 0, 0)
        goal = (s[0], s[1], int(axis == 0), int(axis == 1))
        prev = {start: None}
        queue = deque([start])
        while queue:
            st = queue.popleft()
            if st == goal:
                break
            x, y, wx, wy = st
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                if dy:
                    e = lat2.edge_index(0, (x, y + 1 if dy > 0 else y))
                else:
                    e = lat2.edge_index(1, (x + 1 if dx > 0 else x, y))
                if blocked[e]:
                    continue
                nx, ny = x + dx, y + dy
                nwx = wx ^ int(not 0 <= nx < lx)
                nwy = wy ^ int(not 0 <= ny < ly)
                nxt = (nx % lx, ny % ly, nwx, nwy)
                if nxt not in prev:
                    prev[nxt] = (st, e)
                    queue.append(nxt)
        if goal not in prev:
            continue
        edges = []
        st = goal
        while prev[st] is not None:
            st, e = prev[st]
            edges.append(e)
        if best is None or len(edges) < len(best):
            best = edges
    return best


def _winding_z_milp(code: ConcatenatedCode, lat2: Lattice, axis: int, time_limit: float = 60.0):
    """Lightest Z-only operator on one layer that commutes with all stabilizers
    and crosses a reference primal loop along the other axis an odd number of times.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix, hstack

    lat = code.lattice
    n = lat.n_qubits
    layer = [lat.edge_index(d, (x, y) + ((0,) if lat.dim == 3 else ()))
             for d, (x, y) in (lat2.edge_coords(e) for e in range(lat2.n_qubits))]
    hx = code.stabilizer_matrix[:, :n][:, layer]
    hx = hx[hx.any(axis=1)]
    hx = gf2.rref(hx)[0][: gf2.rank(hx)] if hx.size else hx
    other = 1 - axis
    ref = np.zeros(lat2.n_qubits)
    for t in range(lat2.sizes[other]):
        v = [0, 0]
        v[other] = t
        ref[lat2.edge_index(other, tuple(v))] = 1
    rows = np.concatenate([hx.astype(np.float64), ref[None]])
    m = rows.shape[0]
    a = hstack([csr_matrix(rows), csr_matrix(-2.0 * np.eye(m))]).tocsr()
    rhs = np.zeros(m)
    rhs[-1] = 1
    c = np.concatenate([np.ones(lat2.n_qubits), np.zeros(m)])
    ub = np.concatenate([np.ones(lat2.n_qubits), np.full(m, lat2.n_qubits)])
    res = milp(c, constraints=[LinearConstraint(a, rhs, rhs)], integrality=np.ones(len(c)),
               bounds=Bounds(0, ub), options={"time_limit": time_limit})
    if res.x is None:
        return None
    return [int(e) for e in np.flatnonzero(np.round(res.x[: lat2.n_qubits]))]


def _to_layer(lat: Lattice, edges2: Sequence[int], lat2: Lattice, z: int) -> list[int]:
    out = []
    for e in edges2:
        d, (x, y) = lat2.edge_coords(e)
        out.append(lat.edge_index(d, (x, y, z)))
    return out


def sector_generators(code: ConcatenatedCode) -> list[SectorOperator]:
    """Winding Z loops (2D) or Z membranes (3D) that commute with all stabilizers.

    Loops run on dual cycles that cross no X support of a plaquette
    stabilizer; such cycles commute with every vertex stabilizer because those
    are closed primal loops, and trivially with the Z-type padding checks.
    """
    lat = code.lattice
    n = lat.n_qubits
    xs = _x_support(code.plaquette_stabilizers, n)
    lat2 = Lattice(lat.sizes[:2])
    blocked = np.zeros(lat2.n_qubits, dtype=bool)
    for q in np.flatnonzero(xs):
        d, v = lat.edge_coords(int(q))
        if d < 2:
            blocked[lat2.edge_index(d, v[:2])] = True
    layers = lat.sizes[2] if lat.dim == 3 else 1
    out = []
    for axis in (0, 1):
        loop = _dual_loop(lat2, blocked, axis)
        if loop is None:
            loop = _winding_z_milp(code, lat2, axis)
        if loop is None:
            continue
        edges = loop if lat.dim == 2 else [e for z in range(layers) for e in _to_layer(lat, loop, lat2, z)]
        winding = tuple(int(a == axis) for a in range(lat.dim))
        name = f"Z_loop_{'xy'[axis]}" if lat.dim == 2 else f"Z_membrane_{'xy'[axis]}z"
        out.append(SectorOperator(name, PauliOperator.from_sparse(n, z=edges), winding, lat.sizes[axis]))
    if lat.dim == 3:
        edges = [lat.edge_index(2, (x, y, 0)) for x in range(lat.sizes[0]) for y in range(lat.sizes[1])]
        out.append(SectorOperator("Z_membrane_xy", PauliOperator.from_sparse(n, z=edges), (0, 0, 1),
                                  min(lat.sizes[:2])))
    return out


# -- logicals and distance -------------------------------------------------------


def _swap(m: np.ndarray) -> np.ndarray:
    n = m.shape[1] // 2
    return np.concatenate([m[:, n:], m[:, :n]], axis=1)


def logical_basis(code: ConcatenatedCode, sectors: Sequence[SectorOperator] | None = None) -> np.ndarray:
    """Operators that detect every nontrivial logical modulo stabilizers and sectors.

    Rows commute with all stabilizers and sector operators and are
    independent modulo the stabilizers.  A Pauli in the normaliser lies in
    span(stabilizers, sectors) iff it commutes with every row.
    """
    sectors = sector_generators(code) if sectors is None else sectors
    s = code.stabilizer_matrix
    constraints = np.concatenate([s, stack([sc.op for sc in sectors], code.n_qubits)])
    cands = gf2.nullspace(_swap(constraints))
    rows = []
    space = gf2.rref(s)[0]
    space = space[: gf2.rank(s)]
    cur = gf2.RowSpace(space)
    for v in cands:
        if not cur.contains(v):
            rows.append(v)
            space = np.concatenate([space, v[None]])
            cur = gf2.RowSpace(space)
    return np.array(rows, dtype=np.uint8).reshape(-1, s.shape[1])


@dataclass
class DistanceEstimate:
    lower: int
    upper: int
    exact: bool
    method: str
    witness: PauliOperator | None = field(default=None, repr=False)

    @property
    def value(self) -> int:
        return self.upper


def _milp(s_ind: np.ndarray, targets: np.ndarray, n: int, upper: int | None, time_limit: float):
    """Lightest Pauli commuting with ``s_ind`` and anticommuting with some target row.

    Variables: x (n), z (n), w (n) with w >= x, z; one integer slack per
    parity row; one binary ``y_j`` per target equal to its parity, with
    sum(y) >= 1.  Returns (vector or None, proven optimal or infeasible).
    """
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix, hstack, identity, vstack

    ms, mt = s_ind.shape[0], targets.shape[0]
    m = ms + mt
    rows = csr_matrix(_swap(np.concatenate([s_ind, targets], axis=0)).astype(np.float64))
    y_of_row = np.zeros((m, mt))
    y_of_row[ms:, :] = np.eye(mt)
    parity = hstack([rows, csr_matrix((m, n)), csr_matrix(-2.0 * np.eye(m)), csr_matrix(-y_of_row)])
    eye = identity(n, format="csr")
    zero = csr_matrix((n, n))
    pad = csr_matrix((n, m + mt))
    wx = hstack([eye, zero, -eye, pad])
    wz = hstack([zero, eye, -eye, pad])
    anyy = hstack([csr_matrix((1, 3 * n + m)), csr_matrix(np.ones((1, mt)))])
    a = vstack([parity, wx, wz, anyy]).tocsr()
    lo = np.concatenate([np.zeros(m), np.full(2 * n, -np.inf), [1]])
    hi = np.concatenate([np.zeros(m), np.zeros(2 * n), [np.inf]])
    cons = [LinearConstraint(a, lo, hi)]
    c = np.concatenate([np.zeros(2 * n), np.ones(n), np.zeros(m + mt)])
    if upper is not None:
        cons.append(LinearConstraint(csr_matrix(c[None]), -np.inf, upper))
    ub = np.concatenate([np.ones(3 * n), np.full(m, n), np.ones(mt)])
    res = milp(c, constraints=cons, integrality=np.ones(len(c)), bounds=Bounds(0, ub),
               options={"time_limit": time_limit})
    # status 0: optimal, 2: infeasible (nothing at or below ``upper``)
    proven = res.status in (0, 2)
    if res.x is None:
        return None, proven
    v = np.round(res.x[: 2 * n]).astype(np.uint8)
    if syndrome(v[None], s_ind).any() or not syndrome(v[None], targets).any():
        raise RuntimeError("integer program returned an infeasible point")
    return v, proven


def exact_distance_milp(code: ConcatenatedCode, time_limit: float = 300.0) -> DistanceEstimate:
    """Minimum weight of a normaliser element outside span(stabilizers, sectors).

    A Pauli commuting with the stabilizers is nontrivial iff it anticommutes
    with some row of ``logical_basis``; one integer program minimises weight
    under that condition, seeded with the lightest known logical image.
    """
    n = code.n_qubits
    s = code.stabilizer_matrix
    s_ind = gf2.rref(s)[0][: gf2.rank(s)]
    basis = logical_basis(code)
    best, witness = None, None
    for lg in code.logicals:
        if syndrome(basis, lg.op.symplectic[None]).any() and (best is None or lg.op.weight < best):
            best, witness = lg.op.weight, lg.op
    v, proven = _milp(s_ind, basis, n, None if best is None else best - 1, time_limit)
    if v is not None:
        witness = PauliOperator.from_symplectic(v)
        best = witness.weight
    if best is None:
        raise RuntimeError("no nontrivial logical found")
    return DistanceEstimate(best if proven else 1, best, proven, "milp", witness)


def _packed_words(rows: np.ndarray) -> np.ndarray:
    """Per (qubit, letter) anticommutation signatures packed into uint64 words."""
    n = rows.shape[1] // 2
    sig = []
    for letter in ((1, 0), (0, 1), (1, 1)):
        e = np.zeros((n, 2 * n), dtype=np.uint8)
        e[np.arange(n), np.arange(n)] = letter[0]
        e[np.arange(n), n + np.arange(n)] = letter[1]
        sig.append(gf2.pack(syndrome(e, rows)))
    return np.stack(sig, axis=1)  # (n, 3, words)


def distance_by_enumeration(code: ConcatenatedCode, max_weight: int) -> int | None:
    """Smallest weight <= max_weight of a nontrivial logical, by brute force.

    Every Pauli of each weight is enumerated; its stabilizer syndrome and its
    logical signature are XORs of precomputed single-qubit words.  Returns
    ``None`` when nothing up to ``max_weight`` is found.
    """
    n = code.n_qubits
    s = code.stabilizer_matrix
    s_ind = gf2.rref(s)[0][: gf2.rank(s)]
    basis = logical_basis(code)
    syn = _packed_words(s_ind)
    log = _packed_words(basis)
    letters = np.array(list(itertools.product(range(3), repeat=max_weight)), dtype=np.int64)
    for w in range(1, max_weight + 1):
        lt = np.array(list(itertools.product(range(3), repeat=w)), dtype=np.int64)
        supports = np.array(list(itertools.combinations(range(n), w)), dtype=np.int64)
        for chunk in np.array_split(supports, max(1, len(supports) * len(lt) // 200_000)):
            ss = syn[chunk[:, None, :], lt[None, :, :]]  # (supports, letters, w, words)
            ll = log[chunk[:, None, :], lt[None, :, :]]
            ss = np.bitwise_xor.reduce(ss, axis=2)
            ll = np.bitwise_xor.reduce(ll, axis=2)
            hit = ~ss.any(axis=-1) & ll.any(axis=-1)
            if hit.any():
                return w
    del letters
    return None


def estimate_distance(code: ConcatenatedCode, exact: bool = True, time_limit: float = 120.0) -> DistanceEstimate:
    """Exact distance when the integer programs finish; else the logical-image bound."""
    upper = min(lg.op.weight for lg in code.logicals) if code.logicals else code.n_qubits
    if exact:
        est = exact_distance_milp(code, time_limit)
        if est.upper > upper:
            raise RuntimeError("integer program missed a known logical")
        return est
    return DistanceEstimate(1, upper, False, "logical-images")


# -- census, projection, accounting ----------------------------------------------


def _canonical_points(pts):
    lo = tuple(min(p[a] for p in pts) for a in range(len(pts[0])))
    return tuple(sorted(tuple(c - l for c, l in zip(p, lo)) for p in pts))


def footprint_census(code: ConcatenatedCode) -> Counter:
    """Plaquette stabilizers grouped by vertex footprint modulo translation.

    Each footprint carries one gamma-type and one gamma-tilde-type stabilizer;
    the count per class is the number of stabilizers with that footprint.
    """
    counts: Counter = Counter()
    for info in code.plaquette_info:
        e = code.embeddings[info.block]
        pts = [e.coords[v][:2] for v in code.block.plaquettes[info.plaquette]]
        counts[_canonical_points(pts)] += 1
    return counts


def image_census(code: ConcatenatedCode) -> Counter:
    """Plaquette images grouped by Pauli pattern modulo translation."""
    return Counter((info.tilde, info.local.canonical()) for info in code.plaquette_info)


def _project(op: PauliOperator, lat3: Lattice, lat2: Lattice, plane=(0, 1)) -> PauliOperator:
    """Delete support off the plane's two edge directions and collapse the third axis."""
    x = np.zeros(lat2.n_qubits, dtype=np.uint8)
    z = np.zeros(lat2.n_qubits, dtype=np.uint8)
    for q in op.support:
        d, v = lat3.edge_coords(int(q))
        if d not in plane:
            continue
        e = lat2.edge_index(plane.index(d), (v[plane[0]], v[plane[1]]))
        x[e] ^= op.x[q]
        z[e] ^= op.z[q]
    return PauliOperator(x, z)


def check_projection(code3: ConcatenatedCode, code2: ConcatenatedCode | None = None) -> dict[str, tuple[int, int]]:
    """Count (members, total) per object class after projecting 3D onto 2D.

    Plaquette, padding and in-layer logical images project onto the xy
    plane and are compared with the 2D code of the same block grid modulo the
    2D vertex stabilizers.  Vertex stabilizers are projected onto their own
    plane and compared with the 2D mapping on that plane.
    """
    lat3 = code3.lattice
    if code2 is None:
        code2 = assemble(LayoutSpec(code3.d_Ff, code3.spec.grid[:2], 2, None
                                    if code3.spec.occupied is None else
                                    tuple(sorted({b[:2] for b in code3.spec.occupied})),
                                    code3.spec.first_column))
    lat2 = code2.lattice
    gspace = code2.table.span
    out: dict[str, list[int]] = {}

    def tally(key, ok):
        c = out.setdefault(key, [0, 0])
        c[0] += int(ok)
        c[1] += 1

    def member(a: PauliOperator, b: PauliOperator) -> bool:
        return gspace.contains((a * b).symplectic)

    idx2 = {(e.block_id, ) : i for i, e in enumerate(code2.embeddings)}
    plaq2 = {(code2.embeddings[i.block].block_id, i.plaquette, i.tilde): op
             for i, op in zip(code2.plaquette_info, code2.plaquette_stabilizers)}
    for info, op in zip(code3.plaquette_info, code3.plaquette_stabilizers):
        bid = code3.embeddings[info.block].block_id[:2]
        tally("plaquette", member(_project(op, lat3, lat2), plaq2[(bid, info.plaquette, info.tilde)]))
    for p, op in zip(code3.padding, code3.padding_stabilizers):
        v = lat3.vertex_coords(p)
        tally("padding", member(_project(op, lat3, lat2), code2.table.image(v[:2], "occ")))
    log2 = {}
    for lg in code2.logicals:
        log2[(lg.kind, lg.direction, code2.embeddings[lg.source].block_id, code2.embeddings[lg.target].block_id)] = lg.op
    for lg in code3.logicals:
        if lg.direction == "back":
            continue
        key = (lg.kind, lg.direction, code3.embeddings[lg.source].block_id[:2],
               code3.embeddings[lg.target].block_id[:2])
        tally("logical", key in log2 and member(_project(lg.op, lat3, lat2), log2[key]))
    del idx2
    planes3 = fqmap.PLANES_3D
    tables = {}
    for plane in planes3:
        sizes = (lat3.sizes[plane[0]], lat3.sizes[plane[1]])
        tables[plane] = fqmap.MappingTable(Lattice(sizes))
    for v in lat3.vertices():
        for plane, g in zip(planes3, code3.table.stabilizers_at(v)):
            t2 = tables[plane]
            proj = _project(g, lat3, t2.lattice, plane)
            tally(f"G{'xyz'[plane[0]]}{'xyz'[plane[1]]}", t2.span.contains(proj.symplectic))
    return {k: (v[0], v[1]) for k, v in out.items()}


def logical_count(code: ConcatenatedCode) -> dict:
    k = code.n_logical_qubits
    return {"n_qubits": code.n_qubits, "rank": code.rank, "k": k, "N_F": code.N_F, "n_sector": k - code.N_F}


# -- full report ------------------------------------------------------------------


def check_code(code: ConcatenatedCode, with_distance: bool = False) -> VerificationReport:
    rep = VerificationReport()
    lat = code.lattice
    n = code.n_qubits

    mism, cex = fqmap.validate_homomorphism(code.table)
    rep.add("homomorphism", mism == 0, f"{mism} mismatches" + (f", e.g. {cex}" if cex else ""), 2)

    s = code.stabilizer_matrix
    anti = syndrome(s, s)
    rep.add("stabilizers commute", not anti.any(), f"{int(anti.sum()) // 2} anticommuting pairs", 3)

    gens = code.table.generator_matrix
    g_anti = syndrome(gens, stack(code.g_stabilizers, n))
    rep.add("G commutes with T and W", not g_anti.any(), "", 2)

    if code.logicals:
        lm = stack([lg.op for lg in code.logicals])
        bad = syndrome(lm, s)
        rep.add("logicals commute with stabilizers", not bad.any(), f"{int(bad.any(axis=1).sum())} bad", 4)
        ma = anticommutation_matrix(np.stack([code.logical_monomial(lg).bits for lg in code.logicals]))
        rep.add("logical algebra", np.array_equal(syndrome(lm, lm), ma), "", 4)
        nontriv = ~code.stabilizer_space.contains_many(lm)
        rep.add("logicals are not stabilizers", bool(nontriv.all()), "", 4)

    sectors = sector_generators(code)
    for sc in sectors:
        v = sc.op.symplectic
        comm = not syndrome(v[None], s).any()
        outside = not code.stabilizer_space.contains(v)
        long_enough = sc.op.weight >= sc.min_side
        rep.add(f"sector {sc.name}", comm and outside and long_enough,
                f"weight {sc.op.weight}, side {sc.min_side}", 5)
    expected = 2 if lat.dim == 2 else 3
    rep.add("sector classes found", len(sectors) == expected, f"{len(sectors)} of {expected}", 5)

    acc = logical_count(code)
    st = code.spec
    per_block = len(code.padding) / max(1, code.N_F)
    rep.add("padding per block", st.occupied is not None or per_block == (code.d_Ff - 1) / 4,
            f"{per_block:g}", 6)
    rep.add("logical count", acc["n_sector"] >= 0, f"k={acc['k']}, N_F={acc['N_F']}", 6)
    wl = {lg.op.weight for lg in code.logicals if lg.kind == "W"}
    rep.summary.update(acc)
    rep.summary["census"] = len(footprint_census(code))
    rep.summary["W_L_weights"] = sorted(wl)
    rep.summary["T_L_weights"] = sorted({lg.op.weight for lg in code.logicals if lg.kind == "T"})
    if with_distance:
        est = estimate_distance(code)
        rep.summary["distance"] = {"lower": est.lower, "upper": est.upper, "exact": est.exact}
    return rep
