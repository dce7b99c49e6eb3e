"""Regenerate the JSON fixtures under src/msk/data from hand-read drawings."""
from __future__ import annotations

import json
import math
from pathlib import Path

from msk.complex import MAX, MIN, SADDLE, direction, from_planar_embedding, validate

DATA = Path(__file__).resolve().parents[1] / "src" / "msk" / "data"


def three_lobe_pair():
    """Maxima a, b, c in a row; saddles ab, bct, bcb; minima bc (enclosed) and g (outside)."""
    idx = {"a": MAX, "b": MAX, "c": MAX, "ab": SADDLE, "bct": SADDLE, "bcb": SADDLE, "bc": MIN, "g": MIN}
    edges = [
        ("ab", "a", 180, 0), ("ab", "b", 0, 180),
        ("ab", "g", 90, 135), ("ab", "g", 270, 225),
        ("bct", "b", 180, 90), ("bct", "c", 0, 90),
        ("bct", "bc", 270, 90), ("bct", "g", 90, 60),
        ("bcb", "b", 180, 270), ("bcb", "c", 0, 270),
        ("bcb", "bc", 90, 270), ("bcb", "g", 270, 300),
    ]
    values = {"g": 1, "bc": 2, "bcb": 3, "bct": 4, "ab": 5, "c": 6, "b": 7, "a": 8}
    return from_planar_embedding(idx, edges, outer="g"), values


def triangle():
    """Maxima on a circle, one central minimum, saddles on the chord midpoints."""
    pos = {n: (math.cos(math.radians(t)), math.sin(math.radians(t))) for n, t in (("a", 90), ("b", 210), ("c", 330))}
    mid = {s: ((pos[s[0]][0] + pos[s[1]][0]) / 2, (pos[s[0]][1] + pos[s[1]][1]) / 2) for s in ("ab", "bc", "ca")}
    idx = {"a": MAX, "b": MAX, "c": MAX, "ab": SADDLE, "bc": SADDLE, "ca": SADDLE, "m": MIN, "g": MIN}
    edges = []
    for s, p in mid.items():
        for x in s:
            edges.append((s, x, direction(p, pos[x]), direction(pos[x], p)))
        edges.append((s, "m", direction(p, (0, 0)), direction((0, 0), p)))
        edges.append((s, "g", direction((0, 0), p), direction((0, 0), p)))
    values = {"g": 1, "m": 2, "ab": 3, "ca": 4, "bc": 5, "a": 6, "c": 7, "b": 8}
    return from_planar_embedding(idx, edges, outer="g"), values


def dump(name, obj):
    (DATA / name).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    right, rv = three_lobe_pair()
    left, lv = triangle()
    for g in (left, right):
        rep = validate(g)
        assert rep.ok, rep.messages()
    dump("fig2.graph.json", right.to_dict(rv))
    dump("fig3_right.graph.json", right.to_dict(rv))
    dump("fig3_left.graph.json", left.to_dict(lv))


def histories():
    worm = {"events": [
        {"t": 1, "kind": "min", "args": {"region": "OUTER", "circle": "A"}},
        {"t": 2, "kind": "min", "args": {"region": "OUTER", "circle": "B"}},
        {"t": 3, "kind": "merge_nn", "args": {"a": "A", "b": "B", "into": "C"}},
        {"t": 4, "kind": "max", "args": {"circle": "C"}},
    ]}
    shotglass = {"events": [
        {"t": 1, "kind": "min", "args": {"region": "OUTER", "circle": "A"}},
        {"t": 2, "kind": "min", "args": {"region": "A", "circle": "B"}},
        {"t": 3, "kind": "merge_n", "args": {"outer": "A", "inner": "B", "into": "C"}},
        {"t": 4, "kind": "max", "args": {"circle": "C"}},
    ]}
    return worm, shotglass


def barcodes():
    def bar(b, bt, d, dt):
        return {"dim": 0, "birth": {"v": b, "t": bt}, "death": {"v": d, "t": dt}}

    nested1 = {"flavor": "levelset", "bars": [bar(0, "closed", 5, "closed")]}
    nested2 = {"flavor": "levelset", "bars": [bar(-2, "closed", 3, "closed"), bar(-1, "closed", 2, "open")]}
    nested3 = {"flavor": "levelset", "bars": [bar(-2, "closed", 3, "closed"), bar(-1, "closed", 2, "open"),
                                              bar(0, "closed", 1, "open")]}
    staircase = {"flavor": "levelset", "bars": [bar(0, "closed", 5, "closed"), bar(1, "closed", 4, "open"),
                                                bar(2, "closed", 3, "open")]}
    forbidden = {"flavor": "sublevel", "bars": [bar(0, "closed", 3, "closed"), bar(1, "open", 2, "open")]}
    return {"nested1": nested1, "nested2": nested2, "nested3": nested3, "staircase": staircase,
            "forbidden": forbidden}


def write_rest():
    worm, shot = histories()
    dump("worm.history.json", worm)
    dump("shotglass.history.json", shot)
    for name, b in barcodes().items():
        dump(f"{name}.barcode.json", b)


if __name__ == "__main__":
    main()
    write_rest()
