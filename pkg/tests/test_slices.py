from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import history
from msk import slices as sl
from msk.barcode import barcodes_equal
from msk.slices import OUTER, EmbeddingHistory, Event, EventError, NestingForest


@st.composite
def histories(draw, max_events: int = 12):
    rng = draw(st.randoms(use_true_random=False))
    return sl.random_history(rng, max_events)


def forest(**parent: str) -> NestingForest:
    return NestingForest(dict(parent))


def min_max(t0: float = 0, t1: float = 1) -> EmbeddingHistory:
    return EmbeddingHistory((Event(t0, "min", {"region": OUTER, "circle": "A"}), Event(t1, "max", {"circle": "A"})))


# ---- forests and posets -------------------------------------------------------------------

def test_min_on_empty_forest():
    f = sl.apply_event(NestingForest(), Event(0, "min", {"region": OUTER, "circle": "A"}))
    assert f.circles == ["A"]


def test_nesting_merge_frees_inner_children():
    f = forest(A=OUTER, B="A", C="B", D="A")
    g = sl.apply_event(f, Event(0, "merge_n", {"outer": "A", "inner": "B", "into": "M"}))
    assert dict(g.parent) == {"M": OUTER, "C": OUTER, "D": "M"}


def test_non_nesting_merge_pools_children():
    f = forest(A=OUTER, B=OUTER, C="A", D="B")
    g = sl.apply_event(f, Event(0, "merge_nn", {"a": "A", "b": "B", "into": "M"}))
    assert dict(g.parent) == {"M": OUTER, "C": "M", "D": "M"}


@pytest.mark.parametrize("bad", [
    Event(0, "max", {"circle": "A"}),
    Event(0, "merge_nn", {"a": "A", "b": "B", "into": "M"}),
    Event(0, "merge_n", {"outer": "B", "inner": "A", "into": "M"}),
    Event(0, "min", {"region": "A", "circle": "B"}),
])
def test_inapplicable_events_rejected(bad):
    with pytest.raises(EventError):
        sl.apply_event(forest(A=OUTER, B="A"), bad)


def test_poset_shapes():
    side_by_side = sl.nesting_poset(forest(A=OUTER, B=OUTER))
    chain = sl.nesting_poset(forest(A=OUTER, B="A"))
    other_pair = sl.nesting_poset(forest(X=OUTER, Y=OUTER))
    assert len(side_by_side) == 3 and len(chain) == 3
    assert not sl.poset_isomorphic(side_by_side, chain)
    assert sl.poset_isomorphic(side_by_side, other_pair)
    assert sl.poset_isomorphic(chain, chain)
    assert len(sl.nesting_poset(NestingForest())) == 1
    assert chain.le("B", "A") and chain.le("B", OUTER) and not chain.le("A", "B")


@st.composite
def forests(draw):
    n = draw(st.integers(0, 6))
    parent = {}
    for i in range(n):
        parent[f"c{i}"] = draw(st.sampled_from([OUTER] + [f"c{j}" for j in range(i)]))
    return NestingForest(parent)


@given(forests(), forests())
def test_poset_iso_matches_brute_force(f, g):
    p, q = sl.nesting_poset(f), sl.nesting_poset(g)
    assert len(p) == len(f.circles) + 1
    expected = oracles.poset_iso_bruteforce(p.le, list(p.elements), q.le, list(q.elements))
    assert sl.poset_isomorphic(p, q) == expected


# ---- histories ----------------------------------------------------------------------------

def test_history_validation():
    with pytest.raises(EventError):
        EmbeddingHistory((Event(0, "min", {"region": OUTER, "circle": "A"}),))
    with pytest.raises(EventError):
        EmbeddingHistory((Event(0, "min", {"region": OUTER, "circle": "A"}), Event(0, "max", {"circle": "A"})))
    with pytest.raises(EventError):
        Event.from_dict({"t": 0, "kind": "teleport", "args": {}})


def test_levelset_barcodes_of_fixtures():
    assert str(sl.levelset_barcode(min_max())) == "H0: [0,1]"
    worm, glass = history("worm"), history("shotglass")
    assert str(sl.levelset_barcode(worm)) == "H0: [1,4] [2,3)"
    assert str(sl.levelset_barcode(glass)) == "H0: [1,4] [2,3)"
    assert sl.height_equivalence_necessary(worm, glass)


def test_poset_equivalence_examples():
    worm, glass = history("worm"), history("shotglass")
    assert not sl.poset_equivalent(worm, glass)
    assert sl.poset_equivalent(worm, worm.renamed({"A": "P", "B": "Q", "C": "R"}))
    # three bars: which of two older components the youngest one joins matters
    def three(into: str) -> EmbeddingHistory:
        other = "B" if into == "A" else "A"
        return EmbeddingHistory((
            Event(1, "min", {"region": OUTER, "circle": "A"}),
            Event(2, "min", {"region": OUTER, "circle": "B"}),
            Event(3, "min", {"region": OUTER, "circle": "C"}),
            Event(4, "merge_nn", {"a": into, "b": "C", "into": "D"}),
            Event(5, "merge_nn", {"a": other, "b": "D", "into": "E"}),
            Event(6, "max", {"circle": "E"}),
        ))
    assert not sl.poset_equivalent(three("A"), three("B"))
    assert not oracles.renaming_equivalent(three("A"), three("B"))


def test_fixture_zigzag_arrows():
    z = sl.zigzag(history("shotglass"))
    left, right = z.arrows_at(2)
    assert (left.source, left.target, left.iso) == (5, 4, True)
    assert (right.source, right.target) == (6, 5)
    assert right.injective and not right.surjective
    z = sl.zigzag(history("worm"))
    left, right = z.arrows_at(2)
    assert left.iso and right.surjective and not right.injective
    assert right.mapping["A"] == right.mapping["B"] == "C"


def test_galois_view_carries_caveat():
    view, caveat = sl.zigzag(history("shotglass")).galois_view()
    assert caveat == sl.GALOIS_CAVEAT and "splitting saddles" in caveat
    assert len(view) == 1 and view[0]["event"] == 2


def test_bad_slicing_rejected():
    with pytest.raises(ValueError):
        sl.zigzag(history("worm"), [0, 1.5, 1.7, 3.5, 5])


def test_combinatorial_barcode_examples():
    iv, ok = sl.combinatorial_barcode(min_max())
    assert ok and sorted(i.region for i in iv) == ["A", OUTER]
    iv, ok = sl.combinatorial_barcode(history("worm"))
    assert ok and len(iv) == 3
    outer = next(i for i in iv if i.region == OUTER)
    assert (outer.lo, outer.hi) == (0, 5)


@given(histories())
def test_event_inverse_round_trip(h):
    for f, e in zip(h.forests, h.events):
        after = sl.apply_event(f, e)
        back = sl.apply_event(after, sl.inverse_event(f, e))
        assert dict(back.parent) == dict(f.parent)


@given(histories())
def test_circle_count_changes_by_one(h):
    sizes = [len(f.circles) for f in h.forests]
    assert sizes[0] == 0 and sizes[-1] == 0
    assert all(abs(a - b) == 1 for a, b in zip(sizes, sizes[1:]))


@given(histories())
def test_forests_match_naive_replay(h):
    bounds = [h.times[0] - 1] + h.times + [h.times[-1] + 1]
    for lo, hi in zip(bounds, bounds[1:]):
        x = (lo + hi) / 2
        assert oracles.tree_shape(dict(h.forest_at(x).parent)) == oracles.tree_shape(oracles.replay(h.events, x))


@given(histories())
def test_levelset_barcode_matches_tree_oracle(h):
    b = sl.levelset_barcode(h)
    got = sorted((x.lo, x.birth.closed, x.hi, x.death.closed) for x in b.bars)
    assert got == oracles.levelset_bars_oracle(h)


@given(histories(), st.randoms(use_true_random=False))
def test_renamed_history_equivalent(h, rng):
    ids = sorted({c for e in h.events for c in e.created()})
    names = dict(zip(ids, rng.sample([f"q{i}" for i in range(len(ids))], len(ids))))
    g = h.renamed(names)
    assert sl.poset_equivalent(h, g)
    assert barcodes_equal(sl.levelset_barcode(h), sl.levelset_barcode(g), strict=True)


def test_codes_agree_with_renaming_oracle():
    rng = random.Random(12)
    groups: dict[tuple, list[EmbeddingHistory]] = {}
    for _ in range(1500):
        h = sl.random_history(rng, 8)
        groups.setdefault(tuple((e.t, e.kind) for e in h.events), []).append(h)
    for hs in groups.values():
        for a, b in itertools.combinations(hs[:12], 2):
            assert sl.poset_equivalent(a, b) == oracles.renaming_equivalent(a, b)


@given(histories())
def test_serialization_round_trip(h):
    again = EmbeddingHistory.from_dict(h.to_dict())
    assert again == h
    assert again.to_dict() == h.to_dict()


@given(histories())
def test_combinatorial_barcode_consistent(h):
    iv, ok = sl.combinatorial_barcode(h)
    assert ok
    assert sum(1 for i in iv if i.region == OUTER) == 1
