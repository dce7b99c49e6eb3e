"""Critical values on Morse-Smale maps: sublevel barcodes, merge trees, Reeb graphs, Betti profiles."""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .barcode import SUBLEVEL, Bar, Barcode, Endpoint
from .complex import MAX, MIN, MSGraph, check_valid
from .trees import ReebGraph


class DecorationError(ValueError):
    pass


@dataclass(frozen=True)
class DecoratedMSGraph:
    graph: MSGraph
    values: Mapping[str, float]

    def __post_init__(self) -> None:
        check_valid(self.graph)
        missing = [v for v in self.graph.vertex_ids if v not in self.values]
        if missing:
            raise DecorationError(f"vertices without a value: {', '.join(missing)}")
        vals = [self.values[v] for v in self.graph.vertex_ids]
        if len(set(vals)) != len(vals):
            raise DecorationError("critical values must be pairwise distinct")
        g = self.graph
        for k in range(g.n_edges):
            a, b = g.origin[2 * k], g.origin[2 * k + 1]
            if g.indices[a] > g.indices[b]:
                a, b = b, a
            if not self.values[g.vertex_ids[a]] < self.values[g.vertex_ids[b]]:
                raise DecorationError(
                    f"edge {g.edge_ids[k]}: value of {g.vertex_ids[a]} must lie below {g.vertex_ids[b]}")
        if g.is_base:
            lo, hi = (g.vertex_ids[i] for i in sorted(range(2), key=lambda i: g.indices[i]))
            if not self.values[lo] < self.values[hi]:
                raise DecorationError("the minimum must lie below the maximum")
        object.__setattr__(self, "values", {v: self.values[v] for v in g.vertex_ids})

    def value(self, i: int) -> float:
        return self.values[self.graph.vertex_ids[i]]

    @property
    def critical_values(self) -> list[float]:
        return sorted(self.values.values())

    def shifted(self, c: float) -> DecoratedMSGraph:
        return DecoratedMSGraph(self.graph, {v: x + c for v, x in self.values.items()})

    def ranked(self) -> DecoratedMSGraph:
        order = sorted(self.values, key=self.values.__getitem__)
        return DecoratedMSGraph(self.graph, {v: i for i, v in enumerate(order)})

    def to_dict(self) -> dict[str, Any]:
        return self.graph.to_dict(self.values)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> DecoratedMSGraph:
        g = MSGraph.from_dict(data)
        values = {str(x["id"]): x["value"] for x in data["vertices"] if "value" in x}
        return cls(g, values)


# ---- filtration -------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    dim: int
    value: float
    boundary: frozenset[int]  # positions of faces in the cell list
    name: str


def cells(dg: DecoratedMSGraph) -> list[Cell]:
    """Cells of the quadrangle complex sorted by (value, dim); boundaries are mod-2 face sets."""
    g = dg.graph
    raw: list[tuple[int, float, Any, str]] = []
    for v in range(g.n_vertices):
        if g.is_base and g.indices[v] == MAX:
            continue
        raw.append((0, dg.value(v), frozenset(), g.vertex_ids[v]))
    if g.is_base:
        top = next(v for v in range(2) if g.indices[v] == MAX)
        raw.append((2, dg.value(top), ("base",), "base"))
    else:
        for k in range(g.n_edges):
            a, b = g.origin[2 * k], g.origin[2 * k + 1]
            raw.append((1, max(dg.value(a), dg.value(b)), (a, b), g.edge_ids[k]))
        for walk in g.face_orbits:
            odd: set[int] = set()
            for d in walk:
                odd ^= {d >> 1}
            raw.append((2, max(dg.value(g.origin[d]) for d in walk), tuple(sorted(odd)), g.dart_ids[walk[0]]))
    raw.sort(key=lambda c: (c[1], c[0], c[3]))
    pos_v = {}
    pos_e = {}
    out: list[Cell] = []
    for i, (dim, val, bd, name) in enumerate(raw):
        if dim == 0:
            pos_v[g.vertex_pos[name]] = i
            out.append(Cell(0, val, frozenset(), name))
        elif dim == 1:
            pos_e[g.edge_pos[name]] = i
            out.append(Cell(1, val, frozenset({pos_v[bd[0]], pos_v[bd[1]]}), name))
        else:
            faces = frozenset() if bd == ("base",) else frozenset(pos_e[k] for k in bd)
            out.append(Cell(2, val, faces, name))
    return out


def _reduce(cs: Sequence[Cell]) -> tuple[list[tuple[int, int]], list[int]]:
    """Standard column reduction over GF(2); returns (pairs, unpaired) as cell positions."""
    low_owner: dict[int, int] = {}
    reduced: dict[int, int] = {}
    pairs = []
    paired: set[int] = set()
    for j, c in enumerate(cs):
        col = 0
        for i in c.boundary:
            col |= 1 << i
        while col:
            low = col.bit_length() - 1
            if low not in low_owner:
                low_owner[low] = j
                pairs.append((low, j))
                paired.update((low, j))
                break
            col ^= reduced[low_owner[low]]
        reduced[j] = col
    return pairs, [j for j in range(len(cs)) if j not in paired]


def persistence_pairs(dg: DecoratedMSGraph) -> tuple[list[Cell], list[tuple[int, int]], list[int]]:
    cs = cells(dg)
    pairs, unpaired = _reduce(cs)
    return cs, pairs, unpaired


def sublevel_barcode(dg: DecoratedMSGraph) -> Barcode:
    cs, pairs, unpaired = persistence_pairs(dg)
    bars = []
    for i, j in pairs:
        if cs[i].value < cs[j].value:
            bars.append(Bar(cs[i].dim, Endpoint(cs[i].value, True), Endpoint(cs[j].value, False)))
    for i in unpaired:
        bars.append(Bar(cs[i].dim, Endpoint(cs[i].value, True), None))
    return Barcode(tuple(bars), SUBLEVEL)


# ---- trees --------------------------------------------------------------------------

def _neighbours(g: MSGraph) -> list[list[int]]:
    nb: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for k in range(g.n_edges):
        a, b = g.origin[2 * k], g.origin[2 * k + 1]
        nb[a].append(b)
        nb[b].append(a)
    if g.is_base:
        nb[0].append(1)
        nb[1].append(0)
    return nb


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        self.parent[ra] = rb
        return rb


def _sweep_tree(order: list[int], nb: list[list[int]]) -> list[tuple[int, int]]:
    """Augmented join tree of the sweep ``order``: arcs (earlier top, later vertex)."""
    rank = {v: i for i, v in enumerate(order)}
    uf = _UnionFind(len(order))
    top: dict[int, int] = {}
    arcs = []
    for v in order:
        roots = {uf.find(u) for u in nb[v] if rank[u] < rank[v]}
        for r in sorted(roots, key=lambda r: rank[top[r]]):
            arcs.append((top[r], v))
            uf.union(r, v)
        top[uf.find(v)] = v
    return arcs


def merge_tree(dg: DecoratedMSGraph) -> ReebGraph:
    """Join tree of sublevel connectivity reduced to minima, merging saddles and the global maximum."""
    g = dg.graph
    order = sorted(range(g.n_vertices), key=dg.value)
    arcs = _sweep_tree(order, _neighbours(g))
    up: dict[int, int] = {}
    down: dict[int, list[int]] = {v: [] for v in order}
    for a, b in arcs:
        up[a] = b
        down[b].append(a)
    keep = {v for v in order if len(down[v]) != 1} | {order[-1]}
    edges = []
    for v in keep:
        if v == order[-1]:
            continue
        w = up[v]
        while w not in keep:
            w = up[w]
        edges.append((g.vertex_ids[v], g.vertex_ids[w]))
    heights = {g.vertex_ids[v]: dg.value(v) for v in keep}
    return ReebGraph.build(heights, edges, kind="merge_tree")


def contour_tree(values: Sequence[float], nb: list[list[int]]) -> list[tuple[int, int]]:
    """Contour tree of a simply connected complex from its join and split trees (leaf pruning)."""
    n = len(values)
    asc = sorted(range(n), key=lambda v: values[v])
    jt_up: dict[int, int] = {}
    jt_down: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in _sweep_tree(asc, nb):
        jt_up[a] = b
        jt_down[b].add(a)
    st_down: dict[int, int] = {}
    st_up: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in _sweep_tree(asc[::-1], nb):
        st_down[a] = b
        st_up[b].add(a)

    def is_leaf(v: int) -> bool:
        return (not st_up[v] and len(jt_down[v]) == 1) or (not jt_down[v] and len(st_up[v]) == 1)

    alive = set(range(n))
    heap = [(values[v], v) for v in range(n) if is_leaf(v)]
    heapq.heapify(heap)
    arcs: list[tuple[int, int]] = []
    while len(alive) > 1:
        _, v = heapq.heappop(heap)
        if v not in alive or not is_leaf(v):
            continue
        if not st_up[v]:
            # upper leaf: its contour arc descends along the split tree
            w = st_down[v]
            arcs.append((w, v))
            st_up[w].discard(v)
            (c,) = jt_down[v]
            p = jt_up.get(v)
            jt_down[v].clear()
            if p is not None:
                jt_down[p].discard(v)
                jt_down[p].add(c)
                jt_up[c] = p
            else:
                jt_up.pop(c, None)
            touched = (w, c)
        else:
            w = jt_up[v]
            arcs.append((v, w))
            jt_down[w].discard(v)
            (c,) = st_up[v]
            p = st_down.get(v)
            st_up[v].clear()
            if p is not None:
                st_up[p].discard(v)
                st_up[p].add(c)
                st_down[c] = p
            else:
                st_down.pop(c, None)
            touched = (w, c)
        alive.discard(v)
        for u in touched:
            if u in alive and is_leaf(u):
                heapq.heappush(heap, (values[u], u))
    return arcs


def reeb_graph(dg: DecoratedMSGraph) -> ReebGraph:
    g = dg.graph
    vals = [dg.value(v) for v in range(g.n_vertices)]
    arcs = contour_tree(vals, _neighbours(g))
    heights = {g.vertex_ids[v]: vals[v] for v in range(g.n_vertices)}
    return ReebGraph.build(heights, [(g.vertex_ids[a], g.vertex_ids[b]) for a, b in arcs])


# ---- equivalences -------------------------------------------------------------------

def graph_equivalent(a: DecoratedMSGraph, b: DecoratedMSGraph, rank: bool = False) -> bool:
    """Is the value-matching vertex bijection an isomorphism of abstract multigraphs?"""
    if rank:
        a, b = a.ranked(), b.ranked()
    if sorted(a.values.values()) != sorted(b.values.values()):
        return False
    by_value = {x: v for v, x in b.values.items()}
    phi = {v: by_value[x] for v, x in a.values.items()}
    if any(a.graph.index_of(v) != b.graph.index_of(w) for v, w in phi.items()):
        return False

    def edge_multiset(g: MSGraph, rename) -> list[tuple[str, str]]:
        out = []
        for k in range(g.n_edges):
            u, w = rename(g.vertex_ids[g.origin[2 * k]]), rename(g.vertex_ids[g.origin[2 * k + 1]])
            out.append(tuple(sorted((u, w))))
        return sorted(out)

    return edge_multiset(a.graph, phi.__getitem__) == edge_multiset(b.graph, lambda v: v)


def canonical_slicing(dg: DecoratedMSGraph) -> list[float]:
    vals = dg.critical_values
    mids = [(x + y) / 2 for x, y in zip(vals, vals[1:])]
    return [vals[0] - 1] + mids + [vals[-1] + 1]


def check_slicing(critical: Sequence[float], slicing: Sequence[float]) -> None:
    """A slicing must be increasing with exactly one critical value in each gap."""
    if len(slicing) != len(critical) + 1:
        raise ValueError(f"slicing needs {len(critical) + 1} values, got {len(slicing)}")
    if any(not x < y for x, y in zip(slicing, slicing[1:])):
        raise ValueError("slicing values must be strictly increasing")
    crit = sorted(critical)
    for i, c in enumerate(crit):
        if not slicing[i] < c < slicing[i + 1]:
            raise ValueError(f"gap ({slicing[i]}, {slicing[i + 1]}) does not contain exactly one critical value")


def _rank_gf2(columns: list[int]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            low = col.bit_length() - 1
            if low in pivots:
                col ^= pivots[low]
            else:
                pivots[low] = col
                rank += 1
                break
    return rank


def betti_profile(dg: DecoratedMSGraph, slicing: Sequence[float]) -> list[tuple[int, int, int]]:
    """Betti numbers (mod 2) of the sublevel complex at each slicing value."""
    check_slicing(dg.critical_values, slicing)
    cs = cells(dg)
    out = []
    for a in slicing:
        live = [c for c in cs if c.value <= a]
        n = [sum(1 for c in live if c.dim == k) for k in range(3)]
        ranks = [0, 0, 0, 0]
        for k in (1, 2):
            cols = []
            for c in live:
                if c.dim == k:
                    col = 0
                    for i in c.boundary:
                        col |= 1 << i
                    cols.append(col)
            ranks[k] = _rank_gf2(cols)
        out.append(tuple(n[k] - ranks[k] - ranks[k + 1] for k in range(3)))
    return out


def homologically_equivalent(a: DecoratedMSGraph, b: DecoratedMSGraph) -> bool:
    """Profiles are forced by critical order, so comparing canonical slicings decides the question."""
    if a.graph.n_vertices != b.graph.n_vertices:
        return False
    return betti_profile(a, canonical_slicing(a)) == betti_profile(b, canonical_slicing(b))


# ---- random decorations -----------------------------------------------------------

def random_decoration(g: MSGraph, rng: random.Random) -> DecoratedMSGraph:
    """Distinct values forming a random linear extension of min < saddle < max along edges."""
    above: list[set[int]] = [set() for _ in range(g.n_vertices)]
    indeg = [0] * g.n_vertices
    for k in range(g.n_edges):
        a, b = g.origin[2 * k], g.origin[2 * k + 1]
        if g.indices[a] > g.indices[b]:
            a, b = b, a
        if b not in above[a]:
            above[a].add(b)
            indeg[b] += 1
    if g.is_base:
        lo = g.indices.index(MIN)
        above[lo].add(1 - lo)
        indeg[1 - lo] += 1
    ready = [v for v in range(g.n_vertices) if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop(rng.randrange(len(ready)))
        order.append(v)
        for w in sorted(above[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return DecoratedMSGraph(g, {g.vertex_ids[v]: float(i + 1) for i, v in enumerate(order)})


__all__ = [
    "DecoratedMSGraph", "DecorationError", "sublevel_barcode", "merge_tree", "reeb_graph", "graph_equivalent",
    "betti_profile", "homologically_equivalent", "canonical_slicing", "random_decoration", "cells",
]
