from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import barcode
from msk import realize as rz
from msk import slices as sl
from msk.barcode import LEVELSET, SUBLEVEL, Bar, Barcode, Endpoint, barcodes_equal


def bars(*rows: tuple[float, str, float, str], flavor: str = LEVELSET) -> Barcode:
    """Each entry is (lo, '[' or '(', hi, ']' or ')')."""
    return Barcode(tuple(Bar(0, Endpoint(a, l == "["), Endpoint(b, r == "]")) for a, l, b, r in rows), flavor)


@st.composite
def realizable(draw, max_bars: int = 6):
    rng = draw(st.randoms(use_true_random=False))
    return rz.random_realizable_barcode(rng, draw(st.integers(1, max_bars)))


# ---- mu and the lower bound -----------------------------------------------------------------

def test_mu_examples():
    b = barcode("nested3")
    order = rz.by_length(b)
    assert [rz.mu(b, j) for j in order] == [0, 1, 2]
    apart = bars((0, "[", 10, "]"), (1, "[", 2, ")"), (3, "[", 4, ")"))
    assert rz.mu(apart, 1) == rz.mu(apart, 2) == 1
    with pytest.raises(IndexError):
        rz.mu(b, 7)


def test_lower_bound_examples():
    assert rz.lower_bound(barcode("nested1")) == 1
    assert rz.lower_bound(barcode("nested2")) == 2
    assert rz.lower_bound(barcode("nested3")) == 8
    apart = bars((0, "[", 10, "]"), (1, "[", 2, ")"), (3, "[", 4, ")"))
    assert rz.lower_bound(apart) == 4


@given(realizable(), st.integers(1, 7), st.integers(-20, 20))
def test_lower_bound_rescaling(b, scale, offset):
    moved = Barcode(tuple(Bar(0, Endpoint(x.lo * scale + offset, x.birth.closed),
                              Endpoint(x.hi * scale + offset, x.death.closed)) for x in b.bars), b.flavor)
    assert rz.lower_bound(moved) == rz.lower_bound(b)


# ---- realizability -------------------------------------------------------------------------

def test_realizability_examples():
    assert rz.is_realizable(barcode("forbidden")) == (False, "open bar forbidden in sublevel flavor")
    assert rz.is_realizable(bars((1, "[", 4, "]"), (2, "(", 3, "]")))[0]
    two_tops = bars((0, "[", 3, "]"), (4, "[", 6, "]"))
    assert rz.is_realizable(two_tops) == (False, "no single containing closed bar")
    ok_sub = bars((0, "[", 9, ")"), (1, "[", 2, ")"), flavor=SUBLEVEL)
    ok_sub = Barcode((Bar(0, Endpoint(0, True), None), ok_sub.bars[1]), SUBLEVEL)
    assert rz.is_realizable(ok_sub)[0]
    with pytest.raises(rz.UnrealizableError):
        rz.enumerate_embeddings(two_tops)


# ---- enumeration ---------------------------------------------------------------------------

def test_nested_counts():
    assert len(rz.enumerate_embeddings(barcode("nested1"))) == 1
    two = rz.enumerate_embeddings(barcode("nested2"))
    assert len(two) == 2
    kinds = sorted(tuple(e.kind for e in h.events) for h in two)
    assert kinds == [("min", "min", "merge_n", "max"), ("min", "min", "merge_nn", "max")]
    assert rz.count_classes(barcode("nested3")) == (8, 8, True)
    assert rz.count_classes(barcode("nested1")) == (1, 1, True)


def test_two_disjoint_inside_third():
    apart = bars((0, "[", 10, "]"), (1, "[", 2, ")"), (3, "[", 4, ")"))
    n, bound, ok = rz.count_classes(apart)
    assert (n, bound, ok) == (4, 4, True)  # frozen from enumeration


def test_enumeration_cap(monkeypatch):
    b = rz.random_realizable_barcode(random.Random(0), 4)
    with pytest.raises(rz.EnumerationCapError):
        rz.enumerate_embeddings(b, max_bars=3)
    monkeypatch.setenv("MSK_MAX_BARS", "3")
    with pytest.raises(rz.EnumerationCapError):
        rz.enumerate_embeddings(b)


def test_strict_endpoints_filters():
    b = bars((1, "[", 4, "]"), (2, "(", 3, "]"))
    loose = rz.enumerate_embeddings(b)
    strict = rz.enumerate_embeddings(b, strict_endpoints=True)
    assert len(strict) <= len(loose)
    for h in strict:
        assert barcodes_equal(sl.levelset_barcode(h), b, strict=True)


@settings(max_examples=40)
@given(realizable(max_bars=4))
def test_enumeration_sound(b):
    hs = rz.enumerate_embeddings(b)
    assert hs
    for h in hs:
        assert barcodes_equal(sl.levelset_barcode(h), b)
    for x, y in itertools.combinations(hs, 2):
        assert not sl.poset_equivalent(x, y)
    for x, y in itertools.combinations(hs[:6], 2):
        assert not oracles.renaming_equivalent(x, y)


@settings(max_examples=25)
@given(realizable(max_bars=3), st.randoms(use_true_random=False))
def test_adding_a_bar_never_lowers_the_count(b, rng):
    top = next(x for x in b.bars if x.closed_closed)
    used = {v for x in b.bars for v in (x.lo, x.hi)}
    grid = [top.lo + (top.hi - top.lo) * k / 97 for k in range(1, 97)]
    lo, hi = sorted(rng.sample([v for v in grid if v not in used], 2))
    closed_birth = rng.random() < 0.5
    extra = Barcode(b.bars + (Bar(0, Endpoint(lo, closed_birth), Endpoint(hi, not closed_birth)),), LEVELSET)
    assert rz.count_classes(extra)[0] >= rz.count_classes(b)[0]


# ---- Reeb graphs and default histories -----------------------------------------------------------

def test_staircase_reeb():
    r = rz.reeb_from_barcode(barcode("staircase"))
    edges = sorted(r.height_edges())
    assert edges == [(0, 4), (1, 3), (2, 3), (3, 4), (4, 5)]


def test_small_reebs():
    r = rz.reeb_from_barcode(barcode("nested1"))
    assert len(r.edges) == 1
    h = rz.history_from_reeb(r)
    assert [e.kind for e in h.events] == ["min", "max"]
    worm = rz.history_from_reeb(rz.reeb_from_barcode(barcode("nested2")))
    assert [e.kind for e in worm.events] == ["min", "min", "merge_nn", "max"]


@given(realizable())
def test_reeb_shape(b):
    r = rz.reeb_from_barcode(b)
    assert r.is_tree()
    closed = sorted([x.lo for x in b.bars if x.birth.closed] + [x.hi for x in b.bars if x.death.closed])
    opened = sorted([x.lo for x in b.bars if not x.birth.closed] + [x.hi for x in b.bars if not x.death.closed])
    assert sorted(r.heights[v] for v in r.nodes if r.degree(v) == 1) == closed
    assert sorted(r.heights[v] for v in r.nodes if r.degree(v) == 3) == opened


@given(realizable())
def test_realization_round_trip(b):
    h = rz.history_from_reeb(rz.reeb_from_barcode(b))
    assert barcodes_equal(sl.levelset_barcode(h), b)
    assert all(f.parent[c] == sl.OUTER for f in h.forests for c in f.circles)


@given(realizable())
def test_barcode_serialization(b):
    assert Barcode.from_dict(b.to_dict()) == b
