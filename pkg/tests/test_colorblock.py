import itertools

import pytest

from fermicode import gf2
from fermicode.colorblock import (block_vertex_count, build_block, logical_pair, plaquette_stabilizers,
                                  side_logical)
from fermicode.majorana import m_anticommutes


@pytest.mark.parametrize("d,nv,np_", [(3, 7, 3), (5, 19, 9), (7, 37, 18), (9, 61, 30)])
def test_counts(d, nv, np_):
    b = build_block(d)
    assert b.n_vertices == nv == block_vertex_count(d)
    assert len(b.plaquettes) == np_ == gf2.rank(b.check_matrix)
    # nv fermion modes minus nv - 1 stabilizers (both types) leave one Majorana pair
    assert 2 * np_ == nv - 1


@pytest.mark.parametrize("d", [0, 1, 2, 4, 6])
def test_rejects_bad_distance(d):
    with pytest.raises(ValueError):
        build_block(d)


def test_d5_numbering():
    b = build_block(5)
    sides = [sorted(b.label(v) for v in s) for s in b.sides]
    assert sorted(sides) == sorted([[1, 3, 8, 15, 19], [13, 14, 17, 18, 19], [1, 2, 6, 7, 14]])


@pytest.mark.parametrize("d", [3, 5, 7])
def test_stabilizers_and_logicals(d):
    b = build_block(d)
    stabs = plaquette_stabilizers(b)
    g, gt = logical_pair(b)
    assert not any(m_anticommutes(s, t) for s, t in itertools.combinations(stabs, 2))
    assert not any(m_anticommutes(s, x) for s in stabs for x in (g, gt))
    assert m_anticommutes(g, gt)
    h = b.check_matrix
    for side in range(3):
        # all sides represent the same logical modulo plaquettes
        diff = side_logical(b, side).g ^ g.g
        assert gf2.RowSpace(h).contains(diff)
        assert side_logical(b, side).degree == d


def _min_odd_weight(b):
    # the lightest odd-weight vector with no plaquette syndrome is a logical
    h = b.check_matrix.astype(int)
    n = b.n_vertices
    for w in range(1, n + 1, 2):
        for s in itertools.combinations(range(n), w):
            if not (h[:, list(s)].sum(axis=1) % 2).any():
                return w
    return None


@pytest.mark.parametrize("d", [3, 5])
def test_block_distance(d):
    assert _min_odd_weight(build_block(d)) == d


def test_colors_are_three_and_proper():
    b = build_block(5)
    assert set(b.colors) == {0, 1, 2}
    for i, j in itertools.combinations(range(len(b.plaquettes)), 2):
        if set(b.plaquettes[i]) & set(b.plaquettes[j]):
            assert b.colors[i] != b.colors[j]
