import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermicode import decoder as D
from fermicode import fqmap, verifier as V
from fermicode.colorblock import build_block
from fermicode.majorana import MajoranaMonomial
from fermicode.pauli import PauliOperator, syndrome


@pytest.fixture(scope="module")
def dec_d3(pair_d3):
    return D.Decoder(pair_d3, 0.005)


@pytest.fixture(scope="module")
def dec_3d(stack_d3):
    return D.Decoder(stack_d3, 0.005)


# -- noise ---------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["iid-XZ", "depolarizing"])
def test_noise_rates(kind):
    rng = np.random.default_rng(3)
    e = D.sample_errors(D.NoiseModel(kind, 0.1), 50, 4000, rng)
    hit = (e[:, :50] | e[:, 50:]).mean()
    assert hit == pytest.approx(D.NoiseModel(kind, 0.1).hit_probability(), abs=0.01)
    assert not D.sample_errors(D.NoiseModel(kind, 0.0), 50, 10, rng).any()


@pytest.mark.parametrize("kwargs", [dict(kind="bitflip"), dict(p=1.5), dict(p=-0.1)])
def test_noise_validation(kwargs):
    with pytest.raises(ValueError):
        D.NoiseModel(**kwargs)


# -- inner stage -----------------------------------------------------------------


def test_zero_syndrome_gives_identity(pair_d3, dec_d3, stack_d3, dec_3d):
    for code, dec in ((pair_d3, dec_d3), (stack_d3, dec_3d)):
        z = np.zeros(len(code.g_stabilizers), dtype=np.uint8)
        assert D.inner_decode(z, code, dec).is_identity()


@pytest.mark.parametrize("which", ["2d", "3d"])
@given(seed=st.integers(0, 2**32 - 1))
def test_inner_stage_clears_vertex_syndrome(which, seed, request):
    code = request.getfixturevalue("pair_d3" if which == "2d" else "stack_d3")
    dec = request.getfixturevalue("dec_d3" if which == "2d" else "dec_3d")
    rng = np.random.default_rng(seed)
    errs = D.sample_errors(D.NoiseModel("iid-XZ", 0.03), code.n_qubits, 20, rng)
    res = errs ^ dec.inner_corrections(errs)
    assert not syndrome(res, dec.g).any()
    for row in res:
        assert isinstance(fqmap.pauli_to_majorana(PauliOperator.from_symplectic(row), code.table),
                          (MajoranaMonomial, fqmap.OutsideAlgebra))


def test_3d_single_qubit_errors_fully_corrected(stack_d3, dec_3d):
    errs = D._single_qubit_rows(stack_d3.n_qubits)
    assert dec_3d.lookup.injective
    assert not (errs ^ dec_3d.inner_corrections(errs)).any()


def test_2d_adjacent_pair_leaves_short_residual(pair_d3, dec_d3):
    lat = pair_d3.lattice
    n = pair_d3.n_qubits
    e = PauliOperator.from_sparse(n, x=[lat.edge_index(0, (2, 1)), lat.edge_index(1, (2, 1))])
    res = e.symplectic ^ dec_d3.inner_corrections(e.symplectic[None])[0]
    m = fqmap.pauli_to_majorana(PauliOperator.from_symplectic(res), pair_d3.table)
    assert isinstance(m, MajoranaMonomial) and m.degree <= 4


# -- padding fix -------------------------------------------------------------------


def test_padding_fix_examples(pair_d3):
    nv = pair_d3.lattice.n_vertices
    p = pair_d3.padding[0]
    assert D.padding_fix(MajoranaMonomial.from_sparse(nv, g=[p]), pair_d3).is_identity
    assert D.padding_fix(MajoranaMonomial.from_sparse(nv, gt=[p]), pair_d3).is_identity
    assert D.padding_fix(MajoranaMonomial.from_sparse(nv, g=[p], gt=[p]), pair_d3).is_identity
    v = pair_d3.embeddings[0].vertices[0]
    m = MajoranaMonomial.from_sparse(nv, g=[v], gt=[v])
    assert D.padding_fix(m, pair_d3) == m


# -- per-block ML -------------------------------------------------------------------


@pytest.mark.parametrize("d", [3, 5])
def test_block_table_clears_every_syndrome(d):
    t = D.block_table(d, 0.01)
    b = build_block(d)
    keys = np.arange(1 << b.n_vertices)
    assert (t.syndromes[keys ^ t.correct(keys)] == 0).all()


@pytest.mark.parametrize("d", [3, 5])
def test_block_single_errors_corrected(d):
    b = build_block(d)
    for v in range(b.n_vertices):
        for tilde in (False, True):
            m = MajoranaMonomial.from_sparse(b.n_vertices, **({"gt": [v]} if tilde else {"g": [v]}))
            assert D.block_decode(m, b) == m


def test_block_empty_syndrome():
    b = build_block(3)
    assert D.block_decode(MajoranaMonomial.identity(b.n_vertices), b).is_identity


@pytest.mark.parametrize("d", [3, 5])
def test_block_adversarial_side_string_is_classified(d):
    # more than half a side: the decoder completes it to the side logical
    b = build_block(d)
    side = b.sides[0][: (d + 1) // 2]
    m = MajoranaMonomial.from_sparse(b.n_vertices, g=side)
    total = D.block_decode(m, b) * m
    key = int(total.g.astype(np.int64) @ (1 << np.arange(b.n_vertices)))
    assert D.block_table(d, 0.01).failure(np.array([key]))[0] == 1
    assert total.degree % 2 == 1


def test_block_ml_matches_brute_force():
    b = build_block(3)
    h = b.check_matrix.astype(int)
    q = 0.05
    t = D.block_table(3, q)
    for s in range(1 << h.shape[0]):
        probs = [0.0, 0.0]
        for e in itertools.product((0, 1), repeat=b.n_vertices):
            if int(sum(((h @ np.array(e)) % 2)[i] << i for i in range(h.shape[0]))) == s:
                w = sum(e)
                probs[w % 2] += q ** w * (1 - q) ** (b.n_vertices - w)
        corr = int(t.corrections[s])
        assert bin(corr).count("1") % 2 == int(probs[1] > probs[0])


def test_large_blocks_not_tabulated():
    with pytest.raises(NotImplementedError):
        D.block_table(7)


# -- classification -------------------------------------------------------------------


def test_classify_stabilizer_is_success(pair_d3, dec_d3):
    s = pair_d3.plaquette_stabilizers[0] * pair_d3.g_stabilizers[3]
    assert D.classify_outcome(s, pair_d3, dec_d3).success


def test_classify_occupation_logical(grid_d3):
    dec = D.Decoder(grid_d3, 0.005)
    lg = next(l for l in grid_d3.logicals if l.kind == "W")
    out = D.classify_outcome(lg.op, grid_d3, dec)
    assert not out.success and out.gamma_failures == (lg.source,) and out.gammatilde_failures == (lg.source,)


def test_classify_sector_flip(grid_d3):
    dec = D.Decoder(grid_d3, 0.005)
    sec = V.sector_generators(grid_d3)[0]
    out = D.classify_outcome(sec.op, grid_d3, dec)
    assert out.sector_flip


def test_classify_rejects_syndrome(pair_d3, dec_d3):
    with pytest.raises(D.DecoderBug):
        D.classify_outcome(PauliOperator.from_sparse(pair_d3.n_qubits, x=[0]), pair_d3, dec_d3)


def test_single_qubit_errors_never_fail(pair_d3, dec_d3, pair_d5):
    for code, dec in ((pair_d3, dec_d3), (pair_d5, D.Decoder(pair_d5, 0.005))):
        out = dec.decode_batch(D._single_qubit_rows(code.n_qubits))
        assert out["consistent"].all()
        assert not out["fail_gamma"].any() and not out["fail_gammatilde"].any() and not out["sector"].any()


def test_gamma_tallies_ignore_gammatilde_content(grid_d3):
    # multiplying by the image of a gamma-tilde-only monomial never changes gamma failures
    dec = D.Decoder(grid_d3, 0.01)
    rng = np.random.default_rng(11)
    errs = D.sample_errors(D.NoiseModel("iid-XZ", 0.02), grid_d3.n_qubits, 300, rng)
    base = dec.decode_batch(errs)
    nv = grid_d3.lattice.n_vertices
    extra = []
    for _ in range(len(errs)):
        verts = rng.choice(nv, size=2 * rng.integers(1, 3), replace=False)
        extra.append(fqmap.majorana_to_pauli(MajoranaMonomial.from_sparse(nv, gt=verts), grid_d3.table).symplectic)
    moved = dec.decode_batch(errs ^ np.stack(extra))
    # the complement canonicalisation may flip whole patterns; compare raw gamma failures per block
    raw0 = dec.blocks.failure(dec.block_parts(base["residual_bits"])[0])
    raw1 = dec.blocks.failure(dec.block_parts(moved["residual_bits"])[0])
    assert (raw0 == raw1).all()


# -- Monte Carlo -------------------------------------------------------------------


def test_zero_noise_never_fails(pair_d3):
    st_ = D.run_montecarlo(pair_d3, D.NoiseModel("iid-XZ", 0.0, 1), 500)
    assert st_.P_L == 0.0 and st_.P_b == 0.0 and st_.aborts == 0 and st_.trials == 500


def test_deterministic_and_thread_independent(pair_d3, dec_d3):
    m = D.NoiseModel("iid-XZ", 0.02, 77)
    a = D.run_montecarlo(pair_d3, m, 3000, chunk=1000, decoder=dec_d3)
    b = D.run_montecarlo(pair_d3, m, 3000, chunk=1000, decoder=dec_d3)
    c = D.run_montecarlo(pair_d3, m, 3000, chunk=1000, threads=3, decoder=dec_d3)
    assert a.to_dict() == b.to_dict() == c.to_dict()
    d = D.run_montecarlo(pair_d3, D.NoiseModel("iid-XZ", 0.02, 78), 3000, chunk=1000, decoder=dec_d3)
    assert d.to_dict() != a.to_dict()


def test_progress_reports(pair_d3, dec_d3):
    seen = []
    D.run_montecarlo(pair_d3, D.NoiseModel("iid-XZ", 0.01, 1), 2500, chunk=1000, decoder=dec_d3,
                     progress=lambda done, total: seen.append((done, total)))
    assert seen == [(1000, 2500), (2000, 2500), (2500, 2500)]


def test_include_sector_flag(pair_d3, dec_d3):
    m = D.NoiseModel("iid-XZ", 0.03, 5)
    off = D.run_montecarlo(pair_d3, m, 2000, decoder=dec_d3)
    on = D.run_montecarlo(pair_d3, m, 2000, decoder=dec_d3, include_sector=True)
    assert on.global_failures == off.global_failures_with_sector >= off.global_failures


def test_residual_pair_separation_decays(pair_d3, dec_d3):
    st_ = D.run_montecarlo(pair_d3, D.NoiseModel("iid-XZ", 0.01, 9), 20000, decoder=dec_d3)
    sep = st_.pair_separation
    ks = sorted(k for k in sep if k >= 1)
    assert len(ks) >= 2
    assert all(sep[a] >= sep[b] for a, b in zip(ks, ks[1:]))


def test_stats_merge_is_associative():
    mk = lambda k: D.DecoderStats(2, 3, 2, 0.01, 0, trials=10 * k, gamma_failures=k, global_failures=k,
                                  pair_separation={1: k, k: 1})
    a, b, c = mk(1), mk(2), mk(3)
    assert a.merge(b).merge(c).to_dict() == a.merge(b.merge(c)).to_dict()


def test_wilson_interval():
    lo, hi = D.wilson_interval(30, 1000)
    assert lo < 0.03 < hi
    assert D.wilson_interval(0, 100)[0] == 0.0
    assert D.wilson_interval(0, 0) == (0.0, 1.0)


def test_fit_alpha_recovers_slope():
    pts = [(d, 0.3 * np.exp(-0.9 * d), 10**7) for d in (3, 5, 7)]
    fit = D.fit_alpha(pts)
    assert fit["alpha"] == pytest.approx(0.9, rel=1e-6)
    assert fit["ci95"][0] < 0.9 < fit["ci95"][1]
    with pytest.raises(ValueError):
        D.fit_alpha([(3, 0.1, 100)])


def test_crossing_estimate():
    ps = [0.01, 0.02, 0.04, 0.08]
    curves = {3: [(p, 2 * p) for p in ps], 5: [(p, 2 * p * (p / 0.03)) for p in ps]}
    x = D.crossing_estimate(curves)
    assert 0.02 < x < 0.04
    assert D.crossing_estimate({3: curves[3]}) is None
