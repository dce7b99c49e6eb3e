from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graph
from msk import moves as mv
from msk.complex import MAX, MIN, SADDLE, base_sphere, canonical_code, faces, validate
from msk.moves import MoveError, MoveInstance

CENSUS = [g for _, g in sorted(mv.census(base_sphere(), 10).items())]


def test_base_sphere_moves():
    g = base_sphere()
    ms = mv.enumerate_moves(g)
    assert [m.kind for m in ms] == ["FaceMax", "FaceMin"]
    h = mv.apply_move(g, ms[0])
    assert validate(h).ok
    assert (h.count_index(MIN), h.count_index(SADDLE), h.count_index(MAX)) == (1, 1, 2)
    assert len(faces(h)) == 2


def test_fig2_moves_all_valid():
    g = graph("fig2")
    ms = mv.enumerate_moves(g)
    assert len(ms) == len(set(ms))
    for m in ms:
        assert validate(mv.apply_move(g, m)).ok


def test_rejection_names_pattern():
    with pytest.raises(MoveError, match="no saddle"):
        mv.apply_move(base_sphere(), MoveInstance("CancelFaceMax", ("m", "M")))
    g = graph("fig2")
    with pytest.raises(MoveError):
        mv.apply_move(g, MoveInstance("FaceMax", ("nope",)))
    with pytest.raises(MoveError, match="unknown move kind"):
        MoveInstance.from_dict({"kind": "Teleport", "site": {}})


def test_move_serialization():
    g = graph("fig2")
    for m in mv.enumerate_moves(g):
        assert MoveInstance.from_dict(m.to_dict()) == m


def test_connect_fig3():
    left, right = graph("fig3_left"), graph("fig3_right")
    seq = mv.connect(left, right, 12)
    assert seq is not None and len(seq) == 2
    assert canonical_code(mv.apply_sequence(left, seq)) == canonical_code(right)
    assert mv.connect(left, left, 3) == []


def test_connect_respects_depth():
    g = base_sphere()
    far = next(h for h in CENSUS if h.n_vertices == 10)
    assert mv.connect(g, far, 2) is None
    assert mv.connect(g, far, 4) is not None


def test_census_sizes():
    sizes = [len(mv.census(base_sphere(), n)) for n in (2, 4, 6, 8, 10)]
    assert sizes == [1, 3, 7, 21, 78]
    assert mv.reachable_codes(base_sphere(), 6) == {canonical_code(g) for g in CENSUS if g.n_vertices <= 6}


@given(st.sampled_from(CENSUS), st.randoms(use_true_random=False))
def test_random_move_round_trip(g, rng):
    ms = mv.enumerate_moves(g)
    m = rng.choice(ms)
    h = mv.apply_move(g, m)
    assert validate(h).ok
    assert h.n_vertices == g.n_vertices + (2 if m.is_addition else -2)
    back = mv.inverse_moves(g, m)
    assert any(canonical_code(mv.apply_move(h, b)) == canonical_code(g) for b in back)


@given(st.sampled_from(CENSUS), st.sampled_from(CENSUS))
def test_connect_finds_valid_paths(g, h):
    seq = mv.connect(g, h, 8, max_critical=10)
    assert seq is not None
    cur = g
    for m in seq:
        cur = mv.apply_move(cur, m)
        assert cur.n_vertices <= 10
    assert canonical_code(cur) == canonical_code(h)


def test_enumeration_deterministic():
    rng = random.Random(3)
    for g in rng.sample(CENSUS, 10):
        assert mv.enumerate_moves(g) == mv.enumerate_moves(g)
