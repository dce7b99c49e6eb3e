"""From barcodes back to embeddings: realizability, counting bounds, enumeration, Reeb construction."""
from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .barcode import LEVELSET, SUBLEVEL, Bar, Barcode, Endpoint, barcodes_equal
from .slices import (
    OUTER,
    EmbeddingHistory,
    Event,
    EventError,
    HistoryCoder,
    NestingForest,
    apply_event,
    levelset_barcode,
)
from .trees import ReebGraph

DEFAULT_MAX_BARS = 8


class UnrealizableError(ValueError):
    """The barcode cannot come from a height function on an embedded sphere."""


class EnumerationCapError(ValueError):
    pass


def max_bars_cap() -> int:
    raw = os.environ.get("MSK_MAX_BARS")
    return int(raw) if raw else DEFAULT_MAX_BARS


# ---- realizability -------------------------------------------------------------------

def is_realizable(B: Barcode) -> tuple[bool, str]:
    """Decide realizability; the reason names the first violated condition."""
    bars = list(B.bars)
    if not bars:
        return False, "empty barcode"
    if any(b.dim != 0 for b in bars):
        return False, "only dimension-0 bars are realizable here"
    ends = [b.lo for b in bars] + [b.hi for b in bars if b.death is not None]
    if len(set(ends)) != len(ends):
        return False, "endpoint values must be distinct"
    if B.flavor == SUBLEVEL:
        if any(not b.birth.closed or (b.death is not None and b.death.closed) for b in bars):
            return False, "open bar forbidden in sublevel flavor"
        essential = [b for b in bars if b.death is None]
        if len(essential) != 1:
            return False, "sublevel flavor needs exactly one infinite bar"
        if any(b.lo < essential[0].lo for b in bars):
            return False, "the infinite bar must contain all others"
        return True, "realizable"
    closed = [b for b in bars if b.closed_closed]
    if len(closed) != 1:
        return False, "no single containing closed bar"
    top = closed[0]
    if any(b is not top and not (top.lo < b.lo and b.hi < top.hi) for b in bars):
        return False, "no single containing closed bar"
    for b in bars:
        if b is top:
            continue
        if b.death is None:
            return False, "level-set bars must be finite"
        if b.birth.closed == b.death.closed:
            return False, f"bar {b} must be half-open: one endpoint a min/max, the other a split/merge"
    return True, "realizable"


def require_realizable(B: Barcode) -> None:
    ok, reason = is_realizable(B)
    if not ok:
        raise UnrealizableError(reason)


# ---- counting bound --------------------------------------------------------------------

def mu(B: Barcode, j: int) -> int:
    """Number of bars of B properly containing bar j (values only)."""
    if not 0 <= j < len(B.bars):
        raise IndexError(f"bar index {j} out of range for {len(B.bars)} bars")
    bj = B.bars[j]
    return sum(1 for k, bk in enumerate(B.bars) if k != j and bj.strictly_inside(bk))


def by_length(B: Barcode) -> list[int]:
    """Bar positions sorted by decreasing length, ties by birth value."""
    return sorted(range(len(B.bars)), key=lambda j: (-B.bars[j].length, B.bars[j].lo))


def lower_bound(B: Barcode) -> int:
    order = by_length(B)
    if not order:
        raise ValueError("lower bound needs at least one bar")
    return 2 ** (len(order) - 1) * math.prod(mu(B, j) for j in order[1:])


# ---- enumeration -----------------------------------------------------------------------------

@dataclass(frozen=True)
class _State:
    forest: NestingForest
    comp: dict[str, int]          # circle -> component root (forward sweep)
    comp_birth: dict[int, float]
    coder: HistoryCoder
    events: tuple[Event, ...]
    counter: int


def _endpoint_events(B: Barcode) -> list[tuple[float, str, Bar]]:
    out = []
    for b in B.bars:
        out.append((b.lo, "min" if b.birth.closed else "split", b))
        assert b.death is not None
        out.append((b.hi, "max" if b.death.closed else "merge", b))
    out.sort(key=lambda x: x[0])
    return out


def _subsets(items: list[str]) -> Iterator[list[str]]:
    for r in range(len(items) + 1):
        for combo in combinations(items, r):
            yield list(combo)


def _candidates(st: _State, t: float, kind: str, bar: Bar, last: bool) -> Iterator[tuple[Event, dict[str, int], dict[int, float]]]:
    f = st.forest
    ch = f.child_map()
    comp, births = st.comp, st.comp_birth
    n = st.counter

    def name(i: int) -> str:
        return f"c{n + i}"

    if kind == "min":
        root = max(births, default=-1) + 1
        for r in [OUTER] + f.circles:
            c = name(1)
            yield (Event(t, "min", {"region": r, "circle": c}), {**comp, c: root}, {**births, root: t})
    elif kind == "max":
        for c in f.circles:
            if ch[c]:
                continue
            alone = sum(1 for x in f.circles if comp[x] == comp[c]) == 1
            if alone and not last:
                continue
            rest = {k: v for k, v in comp.items() if k != c}
            yield Event(t, "max", {"circle": c}), rest, births
    elif kind == "merge":
        pairs = []
        for c in f.circles:
            p = f.parent[c]
            for d in ch[p]:
                if c < d:
                    pairs.append(("merge_nn", c, d))
            if p != OUTER:
                pairs.append(("merge_n", p, c))
        for k, x, y in pairs:
            rx, ry = comp[x], comp[y]
            if rx == ry:
                continue
            elder, younger = sorted((rx, ry), key=births.__getitem__)
            if births[younger] != bar.lo:
                continue
            m = name(1)
            new = {c: (elder if r == younger else r) for c, r in comp.items() if c not in (x, y)}
            new[m] = elder
            args = {"a": x, "b": y, "into": m} if k == "merge_nn" else {"outer": x, "inner": y, "into": m}
            yield Event(t, k, args), new, births
    else:  # split
        for c in f.circles:
            x, y = name(1), name(2)
            base = {k: v for k, v in comp.items() if k != c}
            base[x] = base[y] = comp[c]
            for part in _subsets(sorted(ch[c])):
                yield Event(t, "split_nn", {"circle": c, "into": [x, y], "children": part}), base, births
            sibs = sorted(s for s in ch[f.parent[c]] if s != c)
            for part in _subsets(sibs):
                yield (Event(t, "split_n", {"circle": c, "outer": x, "inner": y, "siblings": part}), base, births)


def enumerate_embeddings(B: Barcode, strict_endpoints: bool = False, max_bars: int | None = None) -> list[EmbeddingHistory]:
    """All histories realizing B, one per poset-equivalence class.

    Event kinds are read off the endpoint types (closed birth = min, open
    birth = split, closed death = max, open death = merge).  A depth-first sweep
    tries every placement at each endpoint, merges identical prefixes by their
    canonical code, and keeps a finished history only if its level-set barcode
    equals B (endpoint types compared when ``strict_endpoints``).
    """
    require_realizable(B)
    if B.flavor != LEVELSET:
        raise UnrealizableError("enumeration needs a level-set barcode")
    cap = max_bars_cap() if max_bars is None else max_bars
    if len(B.bars) > cap:
        raise EnumerationCapError(f"{len(B.bars)} bars exceed the enumeration cap of {cap}")
    plan = _endpoint_events(B)
    start = _State(NestingForest(), {}, {}, HistoryCoder(), (), 0)
    layer = {(): start}
    for step, (t, kind, bar) in enumerate(plan):
        last = step == len(plan) - 1
        nxt: dict[tuple, _State] = {}
        for code in sorted(layer):
            st = layer[code]
            for ev, comp, births in _candidates(st, t, kind, bar, last):
                try:
                    forest = apply_event(st.forest, ev)
                except EventError:
                    continue
                coder = st.coder.step(st.forest, ev)
                if coder.code in nxt:
                    continue
                nxt[coder.code] = _State(forest, comp, births, coder, st.events + (ev,), st.counter + len(ev.created()))
        layer = nxt
    out = []
    for code in sorted(layer):
        st = layer[code]
        if len(st.forest):
            continue
        try:
            h = EmbeddingHistory(st.events)
        except EventError:
            continue
        if barcodes_equal(levelset_barcode(h), B, strict=strict_endpoints):
            out.append(h)
    return out


def count_classes(B: Barcode, max_bars: int | None = None) -> tuple[int, int, bool]:
    n = len(enumerate_embeddings(B, max_bars=max_bars))
    bound = lower_bound(B)
    return n, bound, n >= bound


# ---- Reeb graph and default history ---------------------------------------------------------------

def _host(B: Barcode, j: int) -> int | None:
    """Smallest bar properly containing bar j (ties by birth)."""
    hosts = [k for k, b in enumerate(B.bars) if k != j and B.bars[j].strictly_inside(b)]
    if not hosts:
        return None
    return min(hosts, key=lambda k: (B.bars[k].length, B.bars[k].lo))


def reeb_from_barcode(B: Barcode) -> ReebGraph:
    """Tree with the closed bar as trunk; every other bar branches off its smallest host bar."""
    require_realizable(B)
    if B.flavor != LEVELSET:
        raise UnrealizableError("Reeb construction needs a level-set barcode")
    heights: dict[str, float] = {}
    on_branch: dict[int, list[str]] = {j: [] for j in range(len(B.bars))}
    for j, b in enumerate(B.bars):
        lo, hi = f"b{j}lo", f"b{j}hi"
        assert b.death is not None
        heights[lo], heights[hi] = b.lo, b.hi
        on_branch[j] += [lo, hi]
        host = _host(B, j)
        if host is not None:
            # the open endpoint sits on the host's branch
            on_branch[host].append(hi if not b.death.closed else lo)
    edges = []
    for j, nodes in on_branch.items():
        nodes.sort(key=heights.__getitem__)
        edges += list(zip(nodes, nodes[1:]))
    return ReebGraph.build(heights, edges)


def history_from_reeb(R: ReebGraph) -> EmbeddingHistory:
    """Sweep the tree upward with every circle a child of OUTER."""
    if not R.is_tree():
        raise UnrealizableError("Reeb graph of a sphere must be a tree")
    circle: dict[tuple[str, str], str] = {}
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"c{counter}"

    events = []
    for v in R.nodes:
        t = R.heights[v]
        down = [(a, v) for a in R.down(v)]
        up = [(v, b) for b in R.up(v)]
        shape = (len(down), len(up))
        if shape == (0, 1):
            circle[up[0]] = fresh()
            events.append(Event(t, "min", {"region": OUTER, "circle": circle[up[0]]}))
        elif shape == (1, 0):
            events.append(Event(t, "max", {"circle": circle.pop(down[0])}))
        elif shape == (2, 1):
            circle[up[0]] = fresh()
            a, b = sorted(circle.pop(e) for e in down)
            events.append(Event(t, "merge_nn", {"a": a, "b": b, "into": circle[up[0]]}))
        elif shape == (1, 2):
            x, y = fresh(), fresh()
            circle[up[0]], circle[up[1]] = x, y
            events.append(Event(t, "split_nn", {"circle": circle.pop(down[0]), "into": [x, y], "children": []}))
        else:
            raise UnrealizableError(f"node {v} has {shape[0]} lower and {shape[1]} upper edges")
    return EmbeddingHistory(tuple(events))


def random_realizable_barcode(rng: random.Random, n_bars: int) -> Barcode:
    """A closed essential bar around ``n_bars - 1`` random half-open bars with distinct endpoints."""
    vals = sorted(rng.sample(range(1, 20 * n_bars + 1), 2 * n_bars))
    bars = [Bar(0, Endpoint(vals[0], True), Endpoint(vals[-1], True))]
    inner = vals[1:-1]
    rng.shuffle(inner)
    for a, b in zip(inner[::2], inner[1::2]):
        a, b = sorted((a, b))
        closed_birth = rng.random() < 0.5
        bars.append(Bar(0, Endpoint(a, closed_birth), Endpoint(b, not closed_birth)))
    return Barcode(tuple(bars), LEVELSET)

