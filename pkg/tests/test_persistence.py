from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import decorated
from msk import moves as mv
from msk import persistence as ps
from msk.barcode import Barcode, barcodes_equal
from msk.complex import MAX, MIN, SADDLE, base_sphere, relabel

GRAPHS = [g for _, g in sorted(mv.census(base_sphere(), 10).items())]


@st.composite
def decorations(draw):
    g = draw(st.sampled_from(GRAPHS))
    rng = draw(st.randoms(use_true_random=False))
    return ps.random_decoration(g, rng)


def base(lo: float = 0, hi: float = 1) -> ps.DecoratedMSGraph:
    return ps.DecoratedMSGraph(base_sphere(), {"m": lo, "M": hi})


# ---- worked values ----------------------------------------------------------------------

def test_fig3_barcodes():
    for name in ("fig3_left", "fig3_right"):
        b = ps.sublevel_barcode(decorated(name))
        assert str(b) == "H0: [1,inf) [2,3); H1: [4,6) [5,7); H2: [8,inf)"


def test_base_sphere_barcode():
    assert str(ps.sublevel_barcode(base())) == "H0: [0,inf); H2: [1,inf)"


def test_merge_trees():
    for name in ("fig3_left", "fig3_right"):
        t = ps.merge_tree(decorated(name))
        assert t.height_edges() == Counter({(1, 3): 1, (2, 3): 1, (3, 8): 1})
    assert ps.merge_tree(base()).height_edges() == Counter({(0, 1): 1})


def test_reeb_graphs():
    expected = Counter({(1, 3): 1, (2, 3): 1, (3, 4): 1, (4, 5): 1, (4, 6): 1, (5, 7): 1, (5, 8): 1})
    left, right = ps.reeb_graph(decorated("fig3_left")), ps.reeb_graph(decorated("fig3_right"))
    assert left.height_edges() == expected
    assert left.isomorphic(right)
    assert ps.reeb_graph(base()).height_edges() == Counter({(0, 1): 1})


def test_graph_equivalence_examples():
    left, right = decorated("fig3_left"), decorated("fig3_right")
    assert not ps.graph_equivalent(left, right)
    assert ps.graph_equivalent(left, left)
    moved = left.shifted(0.5)
    assert not ps.graph_equivalent(left, moved)
    assert ps.graph_equivalent(left, moved, rank=True)


def test_fig3_b0_sequence():
    dg = decorated("fig3_left")
    slicing = ps.canonical_slicing(dg)
    profile = ps.betti_profile(dg, slicing)
    assert [p[0] for p in profile[1:]] == [1, 2, 1, 1, 1, 1, 1, 1]
    data = dg.to_dict()
    assert [p[0] for p in profile] == [oracles.sublevel_b0(data, a) for a in slicing]
    assert profile[-1] == (1, 0, 1)


def test_homological_equivalence():
    assert ps.homologically_equivalent(decorated("fig3_left"), decorated("fig3_right"))
    profile = ps.betti_profile(base(), ps.canonical_slicing(base()))
    assert [p[0] for p in profile[1:]] == [1, 1] and profile[-1][2] == 1


def test_bad_slicing_rejected():
    dg = decorated("fig3_left")
    with pytest.raises(ValueError, match="exactly one critical value"):
        ps.betti_profile(dg, [0, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 9, 10])
    with pytest.raises(ValueError, match="needs 9 values"):
        ps.betti_profile(dg, [0, 10])


def test_decoration_errors():
    dg = decorated("fig3_left")
    values = dict(dg.values)
    values["g"] = values["m"]
    with pytest.raises(ps.DecorationError, match="distinct"):
        ps.DecoratedMSGraph(dg.graph, values)
    values = dict(dg.values)
    values["ab"] = 100
    with pytest.raises(ps.DecorationError, match="must lie below"):
        ps.DecoratedMSGraph(dg.graph, values)
    with pytest.raises(ps.DecorationError, match="minimum must lie below"):
        base(1, 0)


# ---- properties -----------------------------------------------------------------------

def _value_multiset(dg, index):
    g = dg.graph
    return Counter(dg.value(v) for v in range(g.n_vertices) if g.indices[v] == index)


@given(decorations())
def test_bookkeeping(dg):
    b = ps.sublevel_barcode(dg)
    h0, h1, h2 = b.in_dim(0), b.in_dim(1), b.in_dim(2)
    assert len(h0) == dg.graph.count_index(MIN)
    assert Counter(x.lo for x in h0) == _value_multiset(dg, MIN)
    assert Counter([x.hi for x in h0 if x.death] + [x.lo for x in h1]) == _value_multiset(dg, SADDLE)
    assert Counter([x.hi for x in h1] + [x.lo for x in h2]) == _value_multiset(dg, MAX)
    assert [x.death for x in h0].count(None) == 1
    assert len(h2) == 1 and h2[0].death is None
    assert all(x.death is not None for x in h1)


@given(decorations(), st.integers(-50, 50) | st.sampled_from([0.5, -0.25]))
def test_shift_invariance(dg, c):
    assert barcodes_equal(ps.sublevel_barcode(dg.shifted(c)), ps.sublevel_barcode(dg).shifted(c), strict=True)


@given(decorations())
def test_merge_tree_matches_h0(dg):
    t = ps.merge_tree(dg)
    b0 = ps.sublevel_barcode(dg).in_dim(0)
    leaves = [v for v in t.nodes if not t.down(v)]
    assert sorted(t.heights[v] for v in leaves) == sorted(x.lo for x in b0)
    joins = sorted(t.heights[v] for v in t.nodes if len(t.down(v)) >= 2)
    assert joins == sorted(x.hi for x in b0 if x.death is not None)


@given(decorations())
def test_reeb_graph_is_height_tree(dg):
    r = ps.reeb_graph(dg)
    assert r.is_tree()
    g = dg.graph
    extrema = sorted(dg.value(v) for v in range(g.n_vertices) if g.indices[v] != SADDLE)
    assert sorted(r.heights[v] for v in r.nodes if r.degree(v) == 1) == extrema


@given(decorations())
def test_b0_profile_matches_union_find(dg):
    slicing = ps.canonical_slicing(dg)
    profile = ps.betti_profile(dg, slicing)
    data = dg.to_dict()
    assert [p[0] for p in profile] == [oracles.sublevel_b0(data, a) for a in slicing]
    assert profile[-1] == (1, 0, 1)


@given(decorations(), st.randoms(use_true_random=False))
def test_relabeled_copy_equivalent(dg, rng):
    g = dg.graph
    names = rng.sample([f"w{i}" for i in range(g.n_vertices)], g.n_vertices)
    vmap = dict(zip(g.vertex_ids, names))
    copy = ps.DecoratedMSGraph(relabel(g, vmap=vmap), {vmap[v]: x for v, x in dg.values.items()})
    assert ps.graph_equivalent(dg, copy)
    assert barcodes_equal(ps.sublevel_barcode(dg), ps.sublevel_barcode(copy), strict=True)
    assert ps.reeb_graph(dg).isomorphic(ps.reeb_graph(copy))
    assert ps.homologically_equivalent(dg, copy)


@given(decorations())
def test_decorated_round_trip(dg):
    again = ps.DecoratedMSGraph.from_dict(dg.to_dict())
    assert again.graph == dg.graph and again.values == dg.values
    b = ps.sublevel_barcode(dg)
    assert Barcode.from_dict(b.to_dict()) == b


def test_graph_equivalence_implies_barcodes_on_census():
    rng = random.Random(11)
    dgs = [ps.random_decoration(g, rng).ranked() for g in GRAPHS for _ in range(2)]
    for i, a in enumerate(dgs):
        for b in dgs[i + 1:]:
            if ps.graph_equivalent(a, b):
                assert barcodes_equal(ps.sublevel_barcode(a), ps.sublevel_barcode(b), strict=True)
                assert ps.reeb_graph(a).isomorphic(ps.reeb_graph(b))
