import functools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fermicode import fqmap
from fermicode.lattice import Lattice
from fermicode.majorana import MajoranaMonomial, anticommutation_matrix, is_even, m_anticommutes, m_multiply
from fermicode.pauli import PauliOperator, commutes

# -- Jordan-Wigner matrix oracle for the Majorana rules ----------------------

_I = np.eye(2)
_X = np.array([[0, 1], [1, 0]])
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1, -1])


@functools.lru_cache(maxsize=None)
def _jw(n):
    mats = []
    for j in range(n):
        for s in (_X, _Y):  # gamma_j, then gamma-tilde_j
            ops = [_Z] * j + [s] + [_I] * (n - j - 1)
            mats.append(functools.reduce(np.kron, ops))
    return mats


def _matrix(m):
    n = m.n_vertices
    mats = _jw(n)
    out = np.eye(2 ** n, dtype=complex)
    for j in range(n):
        if m.g[j]:
            out = out @ mats[2 * j]
        if m.gt[j]:
            out = out @ mats[2 * j + 1]
    return out


def monomials(n):
    return st.tuples(arrays(np.uint8, n, elements=st.integers(0, 1)),
                     arrays(np.uint8, n, elements=st.integers(0, 1))).map(lambda t: MajoranaMonomial(*t))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(monomials(n), monomials(n))))
def test_anticommutation_matches_matrices(pair):
    a, b = pair
    ma, mb = _matrix(a), _matrix(b)
    anti = np.allclose(ma @ mb, -(mb @ ma))
    assert anti == m_anticommutes(a, b)
    assert anti != np.allclose(ma @ mb, mb @ ma)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(monomials(n), monomials(n))))
def test_product_matches_matrices_up_to_phase(pair):
    a, b = pair
    prod = _matrix(a) @ _matrix(b)
    ref = _matrix(m_multiply(a, b))
    phase = np.vdot(ref.ravel(), prod.ravel()) / ref.shape[0]
    assert abs(abs(phase) - 1) < 1e-9 and np.allclose(prod, phase * ref)


def test_basic_rules():
    n = 3
    h01 = MajoranaMonomial.hop(n, 0, 1)
    w0 = MajoranaMonomial.occupation(n, 0)
    assert m_anticommutes(h01, w0)
    assert not m_anticommutes(w0, MajoranaMonomial.occupation(n, 1))
    assert (h01 * h01).is_identity and is_even(h01)
    with pytest.raises(ValueError):
        m_multiply(h01, MajoranaMonomial.identity(4))


@given(st.lists(monomials(5), min_size=1, max_size=6))
def test_anticommutation_matrix_matches_pairwise(ms):
    bits = np.stack([m.bits for m in ms])
    a = anticommutation_matrix(bits)
    for i, x in enumerate(ms):
        for j, y in enumerate(ms):
            assert a[i, j] == m_anticommutes(x, y)


# -- mapping table -------------------------------------------------------------


@pytest.mark.parametrize("sizes", [(3, 3), (4, 5), (2, 2, 2), (3, 3, 3)])
def test_homomorphism_small(sizes):
    assert fqmap.validate_homomorphism(fqmap.build_table(Lattice(sizes)))[0] == 0


def test_image_weights():
    t2 = fqmap.build_table(Lattice((5, 5)))
    assert {t2.image((1, 2), k).weight for k in ("hop+x", "hop+y")} == {2}
    assert t2.image((1, 2), "occ").weight == 4
    t3 = fqmap.build_table(Lattice((3, 3, 3)))
    assert {t3.image((1, 1, 1), k).weight for k in ("hop+x", "hop+y", "hop+z")} == {3}
    assert t3.image((1, 1, 1), "occ").weight == 6


def test_hop_up_anticommutes_with_source_occupation():
    lat = Lattice((4, 4))
    t = fqmap.build_table(lat)
    assert not commutes(t.image((1, 1), "hop+y"), t.image((1, 1), "occ"))
    assert not commutes(t.image((1, 1), "hop+y"), t.image((1, 2), "occ"))
    assert commutes(t.image((1, 1), "hop+y"), t.image((2, 2), "occ"))


def test_3d_hops_project_to_plane_images():
    # a 3D hop restricted to one coordinate plane's edges equals that plane's 2D image
    l3, l2 = Lattice((4, 4, 4)), Lattice((4, 4))
    t3, t2 = fqmap.build_table(l3), fqmap.build_table(l2)
    for d in (0, 1):
        op = t3.image((1, 2, 3), f"hop+{'xy'[d]}")
        edges = [l3.edge_coords(q) for q in op.support if l3.edge_coords(q)[0] in (0, 1)]
        want = t2.image((1, 2), f"hop+{'xy'[d]}")
        got = PauliOperator.from_sparse(
            l2.n_qubits,
            x=[l2.edge_index(a, v[:2]) for a, v in edges if op.x[l3.edge_index(a, v)]],
            z=[l2.edge_index(a, v[:2]) for a, v in edges if op.z[l3.edge_index(a, v)]])
        assert got == want


def test_derived_hop_is_reverse_hop():
    lat = Lattice((4, 4))
    t = fqmap.build_table(lat)
    back = fqmap.derived_hopping(lat, (2, 2), "hop-x")
    m = MajoranaMonomial.hop(lat.n_vertices, lat.vertex_index((2, 2)), lat.vertex_index((1, 2)))
    assert fqmap.pauli_to_majorana(back, t) == m
    with pytest.raises(ValueError):
        fqmap.derived_hopping(lat, (2, 2), "hop+x")


def _even_monomials(lat):
    n = lat.n_vertices
    return st.tuples(st.lists(st.integers(0, n - 1), max_size=6),
                     st.lists(st.integers(0, n - 1), max_size=6)).filter(
        lambda t: (len(set(t[0])) + len(set(t[1]))) % 2 == 0).map(
        lambda t: MajoranaMonomial.from_sparse(n, g=set(t[0]), gt=set(t[1])))


@pytest.mark.parametrize("sizes", [(4, 4), (3, 3, 3)])
@given(data=st.data())
def test_majorana_pauli_roundtrip(sizes, data):
    lat = Lattice(sizes)
    table = _table(sizes)
    m = data.draw(_even_monomials(lat))
    p = fqmap.majorana_to_pauli(m, table)
    back = fqmap.pauli_to_majorana(p, table)
    assert isinstance(back, MajoranaMonomial)
    assert (back.bits == table.canonical_majorana(m.bits)).all()


@functools.lru_cache(maxsize=None)
def _table(sizes):
    return fqmap.build_table(Lattice(sizes))


def test_odd_monomial_has_no_image():
    lat = Lattice((4, 4))
    with pytest.raises(ValueError):
        fqmap.majorana_to_pauli(MajoranaMonomial.from_sparse(lat.n_vertices, g=[0]), _table((4, 4)))


def test_outside_algebra_detection():
    lat = Lattice((4, 4))
    t = _table((4, 4))
    single = PauliOperator.from_sparse(lat.n_qubits, x=[0])
    res = fqmap.pauli_to_majorana(single, t)
    assert isinstance(res, fqmap.OutsideAlgebra) and res.reason == "anticommutes"
    # a Z loop winding the torus commutes with every G yet is no product of images
    loop = PauliOperator.from_sparse(lat.n_qubits, z=[lat.edge_index(1, (i, 0)) for i in range(4)])
    res = fqmap.pauli_to_majorana(loop, t)
    assert isinstance(res, fqmap.OutsideAlgebra) and res.reason == "nontrivial-cycle"


def test_total_parity_kernel():
    lat = Lattice((3, 3))
    t = _table((3, 3))
    prod = PauliOperator.identity(lat.n_qubits)
    for v in lat.vertices():
        prod = prod * t.image(v, "occ")
    assert prod.is_identity()
    assert fqmap.pauli_to_majorana(prod, t).is_identity
