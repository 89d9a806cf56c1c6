"""Acceptance criteria, one test each.

Every test records a one-line verdict that is printed in the terminal
summary, then asserts it.  Expected values marked "frozen" were computed
independently (by a second method in the same test or in the unit suite)
and pinned here as regression fixtures.
"""

import time

import pytest

from conftest import ACCEPTANCE
from fermicode import decoder as D
from fermicode import fqmap, verifier as V
from fermicode.assembler import LayoutSpec, assemble
from fermicode.lattice import Lattice
from fermicode.majorana import MajoranaMonomial
from fermicode.pauli import commutes, min_weight_in_coset, syndrome

# frozen: two d_Ff=3 blocks, exact by integer program and by brute-force enumeration
EXACT_DISTANCE_PAIR_D3 = 3

MC_TRIALS = 100_000
MC_P = (0.001, 0.005, 0.02)


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, detail


def test_criterion_01_homomorphism_sweep():
    t0 = time.time()
    results = {}
    for sizes in [(8, 8), (4, 4, 4)]:
        table = fqmap.build_table(Lattice(sizes))
        bad, first = fqmap.validate_homomorphism(table)
        results[sizes] = (bad, len(table.keys))
    dt = time.time() - t0
    ok = all(b == 0 for b, _ in results.values()) and dt < 60
    detail = ", ".join(f"{'x'.join(map(str, s))}: {b} mismatches over {k}^2 pairs" for s, (b, k) in results.items())
    record(1, ok, f"{detail}; {dt:.1f}s")


def test_criterion_02_vertex_stabilizer_identity():
    failures = []
    weights = {2: set(), 3: set()}
    for sizes in [(6, 6), (3, 3, 3)]:
        lat = Lattice(sizes)
        table = fqmap.build_table(lat)
        gens = list(table.images.values())
        planes = fqmap.PLANES_2D if lat.dim == 2 else fqmap.PLANES_3D
        for v in lat.vertices():
            for (r, u), g in zip(planes, fqmap.vertex_stabilizers(lat, v)):
                # corners: d = v (top-left), c = d + r, a = d - u, b = a + r
                d = v
                c = lat.neighbor(d, r)
                a = lat.neighbor(d, u, -1)
                b = lat.neighbor(a, r)
                hr, hu = f"hop+{'xyz'[r]}", f"hop+{'xyz'[u]}"
                pauli = (table.image(d, hr) * table.image(b, hu) * table.image(a, hu)
                         * table.image(a, hr) * table.image(b, "occ") * table.image(d, "occ"))
                n = lat.n_vertices
                ix = lat.vertex_index
                maj = (MajoranaMonomial.hop(n, ix(d), ix(c)) * MajoranaMonomial.hop(n, ix(b), ix(c))
                       * MajoranaMonomial.hop(n, ix(a), ix(d)) * MajoranaMonomial.hop(n, ix(a), ix(b))
                       * MajoranaMonomial.occupation(n, ix(b)) * MajoranaMonomial.occupation(n, ix(d)))
                weights[lat.dim].add(g.weight)
                if pauli != g or not maj.is_identity or not all(commutes(g, h) for h in gens):
                    failures.append((sizes, v, (r, u)))
    # 2D: X on two edges, Y on two, Z on two; each 3D plane adds its own out-of-plane Z edges
    ok = not failures and weights == {2: {6}, 3: {10}}
    record(2, ok, f"G = product of six images, Majorana product trivial, commutes with all T/W "
                  f"(2D 6x6, 3D 3x3x3): {len(failures)} failures; weight 2D {sorted(weights[2])} (want 6), "
                  f"3D {sorted(weights[3])}")


def test_criterion_03_hexagon_decomposition():
    lat = Lattice((8, 8))
    table = fqmap.build_table(lat)
    x, y = 2, 4
    pos = {1: (x, y + 1), 2: (x + 1, y + 1), 3: (x + 2, y + 1), 4: (x + 2, y), 5: (x + 1, y), 6: (x, y)}
    W = lambda k: table.image(pos[k], "occ")
    T = lambda k, kind: table.image(pos[k], kind)
    oracle = W(1) * T(1, "hop+x") * W(4) * T(4, "hop+y") * W(6) * T(6, "hop+x")
    m = MajoranaMonomial.from_sparse(lat.n_vertices, gt=[lat.vertex_index(pos[k]) for k in pos])
    factors = sorted(fqmap.decompose(m, table))
    expected = sorted([(pos[1], "occ"), (pos[1], "hop+x"), (pos[4], "occ"), (pos[4], "hop+y"),
                       (pos[6], "occ"), (pos[6], "hop+x")])
    image = fqmap.majorana_to_pauli(m, table)
    reduced = image * fqmap.vertex_stabilizers(lat, pos[1])[0]
    near = [g for g in table.stabilizers if set(g.support.tolist()) & set(image.support.tolist())]
    best = min_weight_in_coset(image, near)
    ok = (factors == expected and image == oracle and image.weight == 11 and reduced.weight == 9
          and best.weight == 9 and fqmap.pauli_to_majorana(reduced, table) == m)
    record(3, ok, f"factors match W1 T12 W4 T43 W6 T65: {factors == expected}; "
                  f"weight {image.weight} -> {reduced.weight} with G_1; coset minimum {best.weight}")


def test_criterion_04_weight_formulas():
    rows, ok = [], True
    for d in (3, 5, 7):
        code = assemble(LayoutSpec(d, (2, 2)))
        w = sorted({lg.op.weight for lg in code.logicals if lg.kind == "W"})
        t = sorted({lg.op.weight for lg in code.logicals if lg.kind == "T"})
        bound = (5 * d - 1) // 2
        good = w == [2 * d + 2] and min(t) >= bound
        ok &= good
        rows.append(f"d={d}: |W^L|={w} (want {2 * d + 2}), |T^L|={t} (want >= {bound})")
    record(4, ok, "; ".join(rows))


def test_criterion_05_footprint_census():
    c2 = assemble(LayoutSpec(5, (2, 2)))
    c3 = assemble(LayoutSpec(5, (1, 2, 2)))
    n2, n3 = len(V.footprint_census(c2)), len(V.footprint_census(c3))
    record(5, n2 == 6 and n3 == 6, f"d_Ff=5 footprint classes: 2D {n2}, 3D {n3} (want 6, 6)")


def test_criterion_06_padding_count():
    rows, ok = [], True
    for d in (5, 9):
        code = assemble(LayoutSpec(d, (2, 2)))
        per_block = len(code.padding) / code.N_F
        ok &= len(code.padding) * 4 == code.N_F * (d - 1)
        rows.append(f"d={d}: {per_block:g} per block (want {(d - 1) / 4:g})")
    record(6, ok, "; ".join(rows))


@pytest.mark.slow
def test_criterion_07_distance_monotonicity(pair_d3, pair_d5):
    exact = V.exact_distance_milp(pair_d3, time_limit=300)
    enum = V.distance_by_enumeration(pair_d3, EXACT_DISTANCE_PAIR_D3)
    # nothing up to weight d3 on the d_Ff=5 pair, so its distance exceeds d3
    none_d5 = V.distance_by_enumeration(pair_d5, EXACT_DISTANCE_PAIR_D3)
    upper_d5 = min(lg.op.weight for lg in pair_d5.logicals)
    ok = (exact.exact and exact.upper == EXACT_DISTANCE_PAIR_D3 and enum == EXACT_DISTANCE_PAIR_D3
          and none_d5 is None)
    record(7, ok, f"d_Ff=3 pair: exact {exact.upper} (integer program), {enum} (enumeration), fixture "
                  f"{EXACT_DISTANCE_PAIR_D3}; d_Ff=5 pair: >= {EXACT_DISTANCE_PAIR_D3 + 1} "
                  f"(no logical up to weight {EXACT_DISTANCE_PAIR_D3}), <= {upper_d5}")


def test_criterion_08_sector_operators(grid_d3, stack_d3):
    rows, ok = [], True
    for code in (grid_d3, stack_d3):
        secs = V.sector_generators(code)
        s = code.stabilizer_matrix
        want = ({"Z_loop_x", "Z_loop_y"} if code.lattice.dim == 2
                else {"Z_membrane_xz", "Z_membrane_yz", "Z_membrane_xy"})
        names = {x.name for x in secs}
        for x in secs:
            good = (not syndrome(x.op.symplectic[None], s).any()
                    and not code.stabilizer_space.contains(x.op.symplectic)
                    and x.op.weight >= x.min_side)
            ok &= good
            rows.append(f"{x.name} w={x.op.weight}>={x.min_side}{'' if good else ' BAD'}")
        ok &= names == want
    record(8, ok, "; ".join(rows))


def test_criterion_09_projection(stack_d3):
    res = V.check_projection(stack_d3)
    ok = all(g == t and t > 0 for g, t in res.values())
    record(9, ok, ", ".join(f"{k} {g}/{t}" for k, (g, t) in res.items()))


@pytest.fixture(scope="module")
def mc_stats(pair_d3, pair_d5):
    out = {}
    t0 = time.time()
    for code in (pair_d3, pair_d5):
        for p in MC_P:
            out[code.d_Ff, p] = D.run_montecarlo(code, D.NoiseModel("iid-XZ", p, 2024), MC_TRIALS, threads=2)
    return out, time.time() - t0


@pytest.mark.slow
def test_criterion_10_decoder_soundness(mc_stats, stack_d3):
    stats, dt = mc_stats
    t0 = time.time()
    dec = D.Decoder(stack_d3)
    errs = D._single_qubit_rows(stack_d3.n_qubits)
    residual = dec.inner_corrections(errs) ^ errs
    out = dec.decode_batch(errs)
    trivial = not residual.any()
    failed = int((out["fail_gamma"].any(1) | out["fail_gammatilde"].any(1) | out["sector"]).sum())
    dt += time.time() - t0
    aborts = sum(s.aborts for s in stats.values())
    done = all(s.trials == MC_TRIALS for s in stats.values())
    ok = aborts == 0 and done and trivial and failed == 0 and dt < 600
    record(10, ok, f"{len(stats)}x{MC_TRIALS} trials, {aborts} aborts; 3D: {errs.shape[0]} single-qubit errors, "
                   f"residual trivial {trivial}, {failed} failures; {dt:.0f}s")


@pytest.mark.slow
def test_criterion_11_suppression(mc_stats):
    stats, _ = mc_stats
    events = lambda s: s.gamma_failures + s.gammatilde_failures
    chosen = next((p for p in MC_P if events(stats[3, p]) >= 30 and events(stats[5, p]) >= 30), None)
    assert chosen is not None, "no p with 30 events for both codes"
    s3, s5 = stats[3, chosen], stats[5, chosen]
    lo3, _ = s3.P_b_interval()
    _, hi5 = s5.P_b_interval()
    separated = s5.P_b < s3.P_b and hi5 < lo3
    z = {d: s.independence_z() for d, s in ((3, s3), (5, s5))}
    curves = {d: [(p, stats[d, p].P_b) for p in MC_P] for d in (3, 5)}
    cross = D.crossing_estimate(curves)
    ok = separated and all(abs(v) <= 3 for v in z.values())
    record(11, ok, f"p={chosen}: P_b(3)={s3.P_b:.2e} [lo {lo3:.2e}], P_b(5)={s5.P_b:.2e} [hi {hi5:.2e}], "
                   f"separated {separated}; 1-P_L vs (1-P_b)^2N_F: z(3)={z[3]:.1f}, z(5)={z[5]:.1f}; "
                   f"crossing {cross if cross is None else f'{cross:.3g}'}")


def test_criterion_12_logical_count():
    rows, ok = [], True
    for dim_grid, subsets in [
        ((2, 2), [None, ((0, 0), (0, 1), (1, 0)), ((0, 0), (1, 1)), ((0, 0),)]),
        ((1, 2, 2), [None, ((0, 0, 0), (0, 1, 0)), ((0, 0, 0),)]),
    ]:
        sectors = set()
        for occ in subsets:
            code = assemble(LayoutSpec(3, dim_grid, occupied=occ))
            info = V.logical_count(code)
            sectors.add(info["n_sector"])
            ok &= info["k"] == info["N_F"] + info["n_sector"]
        ok &= len(sectors) == 1
        rows.append(f"{len(dim_grid)}D grid {dim_grid}: N_F sweep {[len(s) if s else 'all' for s in subsets]}, "
                    f"n_sector {sorted(sectors)}")
    record(12, ok, "; ".join(rows))
