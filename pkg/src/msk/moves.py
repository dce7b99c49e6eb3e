"""Face, edge and vertex moves (and their cancellations) on Morse-Smale maps.

Every rewrite is assembled from a few planarity-preserving primitives on a
mutable copy of the map: subdividing an edge, adding a chord across a face,
adding a pendant edge, splitting a vertex, and the inverses of these.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Iterator, Mapping

from .complex import (
    MAX,
    MIN,
    SADDLE,
    CanonicalCode,
    InvalidGraphError,
    MSGraph,
    _code,
    check_valid,
)

ADDITIONS = ("FaceMax", "FaceMin", "EdgeMax", "EdgeMin", "VertexMax", "VertexMin")
CANCELLATIONS = tuple("Cancel" + k for k in ADDITIONS)
MOVE_KINDS = ADDITIONS + CANCELLATIONS
_SITE_KEYS = {
    "Face": ("face",),
    "Edge": ("edge",),
    "Vertex": ("vertex", "gap1", "gap2"),
    "Cancel": ("saddle", "extremum"),
}


class MoveError(ValueError):
    """The move does not apply at the requested site."""


@dataclass(frozen=True, order=True)
class MoveInstance:
    kind: str
    site: tuple[str, ...]

    @property
    def is_addition(self) -> bool:
        return self.kind in ADDITIONS

    @property
    def extremum_index(self) -> int:
        return MAX if self.kind.endswith("Max") else MIN

    def _keys(self) -> tuple[str, ...]:
        if self.kind.startswith("Cancel"):
            return _SITE_KEYS["Cancel"]
        for prefix in ("Face", "Edge", "Vertex"):
            if self.kind.startswith(prefix):
                return _SITE_KEYS[prefix]
        raise MoveError(f"unknown move kind {self.kind}")

    def to_dict(self) -> dict[str, Any]:
        keys = self._keys()
        site: dict[str, Any] = dict(zip(keys, self.site))
        if self.kind.startswith("Vertex"):
            site = {"vertex": self.site[0], "gaps": list(self.site[1:])}
        return {"kind": self.kind, "site": site}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> MoveInstance:
        kind = data.get("kind")
        if kind not in MOVE_KINDS:
            raise MoveError(f"unknown move kind {kind!r}")
        site = data.get("site", {})
        if kind.startswith("Vertex"):
            gaps = site.get("gaps", [])
            if len(gaps) != 2:
                raise MoveError("vertex move needs two gaps")
            return cls(kind, (str(site["vertex"]), str(gaps[0]), str(gaps[1])))
        keys = cls(kind, ())._keys()
        try:
            return cls(kind, tuple(str(site[k]) for k in keys))
        except KeyError as exc:
            raise MoveError(f"{kind} site lacks {exc}") from None

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(self.site)})"


# ---- mutable map ---------------------------------------------------------------

class _Map:
    """Editable copy of an MSGraph; darts keep the ``twin = d ^ 1`` layout."""

    def __init__(self, g: MSGraph):
        self.ids = list(g.vertex_ids)
        self.idx = list(g.indices)
        self.rot = [list(r) for r in g.rotations]
        self.origin = list(g.origin)
        self.edge_ids = list(g.edge_ids)
        self.dart_ids = list(g.dart_ids)
        self.v_alive = [True] * len(self.ids)
        self.e_alive = [True] * len(self.edge_ids)
        self._used = set(self.ids) | set(self.edge_ids) | set(self.dart_ids)
        self._counter = {"v": len(self.ids), "e": len(self.edge_ids), "d": len(self.dart_ids)}

    def _fresh(self, prefix: str) -> str:
        while True:
            name = f"{prefix}{self._counter[prefix]}"
            self._counter[prefix] += 1
            if name not in self._used:
                self._used.add(name)
                return name

    def succ(self, d: int) -> int:
        r = self.rot[self.origin[d]]
        return r[(r.index(d) + 1) % len(r)]

    def face(self, d: int) -> list[int]:
        walk = [d]
        x = self.succ(d ^ 1)
        while x != d:
            walk.append(x)
            x = self.succ(x ^ 1)
        return walk

    def corner_of_index(self, d: int, k: int) -> int:
        """Outgoing dart of the unique corner of index ``k`` on the face of ``d``."""
        hits = [x for x in self.face(d) if self.idx[self.origin[x]] == k]
        if len(hits) != 1:
            raise MoveError(f"face has {len(hits)} corners of index {k}, expected 1")
        return hits[0]

    # primitives
    def add_vertex(self, index: int) -> int:
        self.ids.append(self._fresh("v"))
        self.idx.append(index)
        self.rot.append([])
        self.v_alive.append(True)
        return len(self.ids) - 1

    def new_edge(self, u: int, v: int) -> int:
        """New edge with dart ``2k`` at ``u`` and ``2k+1`` at ``v``; darts not yet placed in rotations."""
        k = len(self.edge_ids)
        self.edge_ids.append(self._fresh("e"))
        self.e_alive.append(True)
        self.dart_ids += [self._fresh("d"), self._fresh("d")]
        self.origin += [u, v]
        return 2 * k

    def insert_before(self, v: int, ref: int | None, d: int) -> None:
        r = self.rot[v]
        if ref is None:
            r.append(d)
        else:
            r.insert(r.index(ref), d)

    def add_chord(self, u: int, out_u: int | None, v: int, out_v: int | None) -> int:
        d = self.new_edge(u, v)
        self.insert_before(u, out_u, d)
        self.insert_before(v, out_v, d ^ 1)
        return d

    def add_pendant(self, v: int, out: int, index: int) -> int:
        x = self.add_vertex(index)
        d = self.new_edge(v, x)
        self.insert_before(v, out, d)
        self.rot[x].append(d ^ 1)
        return x

    def subdivide(self, d: int, index: int) -> int:
        """Insert a vertex on the edge of ``d``; ``d`` then ends at the new vertex."""
        t = d ^ 1
        b = self.origin[t]
        n = self.add_vertex(index)
        q = self.new_edge(b, n)
        rb = self.rot[b]
        rb[rb.index(t)] = q
        self.origin[t] = n
        self.rot[n] = [t, q ^ 1]
        return n

    def delete_edge(self, d: int) -> None:
        for x in (d, d ^ 1):
            self.rot[self.origin[x]].remove(x)
        self.e_alive[d >> 1] = False

    def delete_vertex(self, v: int) -> None:
        assert not self.rot[v]
        self.v_alive[v] = False

    def unsubdivide(self, n: int) -> int:
        """Remove degree-2 vertex ``n`` and fuse its two edges; returns the new dart at the first neighbour."""
        x, y = self.rot[n]
        xa, yb = x ^ 1, y ^ 1
        a, b = self.origin[xa], self.origin[yb]
        f = self.new_edge(a, b)
        ra, rb = self.rot[a], self.rot[b]
        ra[ra.index(xa)] = f
        rb[rb.index(yb)] = f ^ 1
        self.rot[n] = []
        self.e_alive[x >> 1] = False
        self.e_alive[y >> 1] = False
        self.v_alive[n] = False
        return f

    def split_vertex(self, v: int, i: int, j: int) -> int:
        """Split ``v`` at rotation gaps i < j; returns the dart at ``v`` of the new joining edge."""
        r = self.rot[v]
        part1, part2 = r[i:j], r[j:] + r[:i]
        w = self.add_vertex(self.idx[v])
        h = self.new_edge(v, w)
        self.rot[v] = part1 + [h]
        self.rot[w] = part2 + [h ^ 1]
        for d in part2:
            self.origin[d] = w
        return h

    def contract(self, d: int) -> int:
        u, w = self.origin[d], self.origin[d ^ 1]
        ru, rw = self.rot[u], self.rot[w]
        i, j = ru.index(d), rw.index(d ^ 1)
        seq_u = ru[i + 1:] + ru[:i]
        seq_w = rw[j + 1:] + rw[:j]
        for x in seq_w:
            self.origin[x] = u
        self.rot[u] = seq_u + seq_w
        self.rot[w] = []
        self.v_alive[w] = False
        self.e_alive[d >> 1] = False
        return u

    def freeze(self) -> MSGraph:
        vmap = {}
        for v, alive in enumerate(self.v_alive):
            if alive:
                vmap[v] = len(vmap)
        edges = [k for k, alive in enumerate(self.e_alive) if alive]
        dmap = {}
        for n, k in enumerate(edges):
            dmap[2 * k] = 2 * n
            dmap[2 * k + 1] = 2 * n + 1
        origin = [0] * (2 * len(edges))
        succ = [0] * (2 * len(edges))
        for v in vmap:
            r = self.rot[v]
            for p, d in enumerate(r):
                origin[dmap[d]] = vmap[v]
                succ[dmap[d]] = dmap[r[(p + 1) % len(r)]]
        return MSGraph(
            tuple(self.ids[v] for v in vmap),
            tuple(self.idx[v] for v in vmap),
            tuple(origin),
            tuple(succ),
            tuple(self.edge_ids[k] for k in edges),
            tuple(self.dart_ids[2 * k + s] for k in edges for s in (0, 1)),
        )


# ---- rewrites --------------------------------------------------------------------

def _other(k: int) -> int:
    return 2 - k


def _face_move(m: _Map, face_dart: int | None, k: int) -> None:
    if face_dart is None:
        # base sphere: join the two extrema first so the generic recipe applies
        a = next(v for v in range(len(m.ids)) if m.idx[v] == k)
        dv = next(v for v in range(len(m.ids)) if m.idx[v] == _other(k))
        c = m.add_chord(a, None, dv, None)
    else:
        a_out = m.corner_of_index(face_dart, k)
        d_out = m.corner_of_index(face_dart, _other(k))
        a, dv = m.origin[a_out], m.origin[d_out]
        c = m.add_chord(a, a_out, dv, d_out)
    e = m.subdivide(c, SADDLE)
    q1 = m.rot[e][1]            # e -> d
    out_d = m.succ(q1 ^ 1)      # next dart of the face of q1 at d
    m.add_chord(e, q1, dv, out_d)
    m.add_pendant(e, q1, k)


def _edge_move(m: _Map, u: int, k: int) -> None:
    """``u`` leaves a saddle towards an extremum of index ``k``."""
    x = m.subdivide(u, k)
    q1 = m.rot[x][1]            # x -> M
    t = m.subdivide(q1, SADDLE)
    for out in list(m.rot[t]):
        opp = m.corner_of_index(out, _other(k))
        m.add_chord(t, out, m.origin[opp], opp)


def _vertex_move(m: _Map, v: int, g1: int, g2: int, k: int) -> None:
    r = m.rot[v]
    i, j = sorted((r.index(g1), r.index(g2)))
    h = m.split_vertex(v, i, j)
    s = m.subdivide(h, SADDLE)
    for out in list(m.rot[s]):
        opp = m.corner_of_index(out, _other(k))
        m.add_chord(s, out, m.origin[opp], opp)


def _arcs(m: _Map, s: int, k: int) -> list[int]:
    return [d for d in m.rot[s] if m.idx[m.origin[d ^ 1]] == k]


def _cancel_face(m: _Map, s: int, x: int, k: int) -> None:
    m.delete_edge(m.rot[x][0])
    m.delete_vertex(x)
    m.delete_edge(_arcs(m, s, _other(k))[1])
    f = m.unsubdivide(s)
    m.delete_edge(f)


def _cancel_edge(m: _Map, t: int, x: int, k: int) -> None:
    for d in _arcs(m, t, _other(k)):
        m.delete_edge(d)
    m.unsubdivide(t)
    m.unsubdivide(x)


def _cancel_vertex(m: _Map, s: int, k: int) -> None:
    for d in _arcs(m, s, _other(k)):
        m.delete_edge(d)
    f = m.unsubdivide(s)
    m.contract(f)


# ---- pattern matching for cancellations ---------------------------------------------

def _cancel_failure(g: MSGraph, kind: str, s: int, x: int) -> str | None:
    """Reason the cancellation pattern fails at (saddle s, extremum x), or None if it matches."""
    k = MAX if kind.endswith("Max") else MIN
    name = kind
    if g.indices[s] != SADDLE:
        return f"{name}: {g.vertex_ids[s]} is not a saddle"
    if g.indices[x] != k:
        return f"{name}: {g.vertex_ids[x]} has index {g.indices[x]}, expected {k}"
    rot = g.rotations[s]
    same = [g.target(d) for d in rot if g.indices[g.target(d)] == k]
    opp = [g.target(d) for d in rot if g.indices[g.target(d)] == _other(k)]
    if x not in same:
        return f"{name}: {g.vertex_ids[x]} is not adjacent to saddle {g.vertex_ids[s]}"
    if kind.startswith("CancelFace"):
        if g.degree(x) != 1:
            return f"{name}: extremum {g.vertex_ids[x]} has degree {g.degree(x)}, pattern requires 1"
        if opp[0] != opp[1]:
            return f"{name}: saddle {g.vertex_ids[s]} lacks doubled arcs to one opposite extremum"
        if same[0] == same[1]:
            return f"{name}: saddle {g.vertex_ids[s]} meets {g.vertex_ids[x]} twice"
        return None
    if kind.startswith("CancelEdge"):
        if g.degree(x) != 2:
            return f"{name}: extremum {g.vertex_ids[x]} has degree {g.degree(x)}, pattern requires 2"
        nbrs = [g.target(d) for d in g.rotations[x]]
        if nbrs.count(s) != 1:
            return f"{name}: extremum {g.vertex_ids[x]} must meet two distinct saddles"
        if same[0] == same[1]:
            return f"{name}: saddle {g.vertex_ids[s]} meets {g.vertex_ids[x]} twice"
        return None
    if kind.startswith("CancelVertex"):
        if same[0] == same[1]:
            return f"{name}: saddle {g.vertex_ids[s]} meets one extremum twice"
        if any(g.degree(y) < 2 for y in same):
            return f"{name}: both extrema of {g.vertex_ids[s]} need degree >= 2"
        if x != max(same):
            return f"{name}: paired extremum must be the later-listed of the two"
        return None
    return f"unknown cancellation {kind}"


# ---- public API ------------------------------------------------------------------------

def enumerate_moves(g: MSGraph, *, additions: bool = True, cancellations: bool = True,
                    _checked: bool = False) -> list[MoveInstance]:
    """All move instances applicable to ``g`` in a fixed deterministic order."""
    if not _checked:
        check_valid(g)
    out: list[MoveInstance] = []
    if additions:
        if g.is_base:
            out += [MoveInstance("FaceMax", ("base",)), MoveInstance("FaceMin", ("base",))]
        else:
            face_ids = [g.dart_ids[w[0]] for w in g.face_orbits]
            out += [MoveInstance("FaceMax", (f,)) for f in face_ids]
            out += [MoveInstance("FaceMin", (f,)) for f in face_ids]
            for kind, k in (("EdgeMax", MAX), ("EdgeMin", MIN)):
                for e in range(g.n_edges):
                    ends = {g.indices[g.origin[2 * e]], g.indices[g.origin[2 * e + 1]]}
                    if k in ends:
                        out.append(MoveInstance(kind, (g.edge_ids[e],)))
            for kind, k in (("VertexMax", MAX), ("VertexMin", MIN)):
                for v in range(g.n_vertices):
                    if g.indices[v] != k:
                        continue
                    rot = [g.dart_ids[d] for d in g.rotations[v]]
                    for a, b in combinations(rot, 2):
                        out.append(MoveInstance(kind, (g.vertex_ids[v], a, b)))
    if cancellations and not g.is_base:
        for kind in CANCELLATIONS:
            for s in range(g.n_vertices):
                if g.indices[s] != SADDLE:
                    continue
                cands = sorted({g.target(d) for d in g.rotations[s]})
                for x in cands:
                    if _cancel_failure(g, kind, s, x) is None:
                        out.append(MoveInstance(kind, (g.vertex_ids[s], g.vertex_ids[x])))
    return out


def apply_move(g: MSGraph, move: MoveInstance, *, _checked: bool = False) -> MSGraph:
    """Apply one move; raises MoveError naming the failed pattern when the site does not fit."""
    if not _checked:
        check_valid(g)
    kind, site = move.kind, move.site
    if kind not in MOVE_KINDS:
        raise MoveError(f"unknown move kind {kind!r}")
    k = move.extremum_index
    m = _Map(g)
    if kind.startswith("Face"):
        if g.is_base:
            if site != ("base",):
                raise MoveError(f"{kind}: the base sphere has the single face 'base'")
            _face_move(m, None, k)
        else:
            d = g.dart_pos.get(site[0])
            if d is None or all(w[0] != d for w in g.face_orbits):
                raise MoveError(f"{kind}: no face with id {site[0]!r}")
            _face_move(m, d, k)
    elif kind.startswith("Edge"):
        e = g.edge_pos.get(site[0])
        if e is None:
            raise MoveError(f"{kind}: no edge {site[0]!r}")
        ds = [d for d in (2 * e, 2 * e + 1) if g.indices[g.origin[d]] == SADDLE]
        if len(ds) != 1 or g.indices[g.target(ds[0])] != k:
            raise MoveError(f"{kind}: edge {site[0]} is not a saddle-{'max' if k == MAX else 'min'} edge")
        _edge_move(m, ds[0], k)
    elif kind.startswith("Vertex"):
        v = g.vertex_pos.get(site[0])
        if v is None or g.indices[v] != k:
            raise MoveError(f"{kind}: {site[0]!r} is not a vertex of index {k}")
        rot = g.rotations[v]
        gaps = [g.dart_pos.get(x) for x in site[1:]]
        if any(x is None or x not in rot for x in gaps):
            raise MoveError(f"{kind}: gaps must be named by darts around {site[0]}")
        if gaps[0] == gaps[1]:
            raise MoveError(f"{kind}: the two gaps must be distinct")
        _vertex_move(m, v, gaps[0], gaps[1], k)
    else:
        if g.is_base:
            raise MoveError(f"{kind}: the base sphere has no saddle")
        s, x = g.vertex_pos.get(site[0]), g.vertex_pos.get(site[1])
        if s is None or x is None:
            raise MoveError(f"{kind}: unknown vertex in site {site}")
        reason = _cancel_failure(g, kind, s, x)
        if reason is not None:
            raise MoveError(reason)
        if kind.startswith("CancelFace"):
            _cancel_face(m, s, x, k)
        elif kind.startswith("CancelEdge"):
            _cancel_edge(m, s, x, k)
        else:
            _cancel_vertex(m, s, k)
    return m.freeze()


def inverse_moves(g: MSGraph, move: MoveInstance) -> list[MoveInstance]:
    """Instances on ``apply_move(g, move)`` of the opposite family (cancel <-> add)."""
    h = apply_move(g, move)
    return enumerate_moves(h, additions=not move.is_addition, cancellations=move.is_addition)


# ---- search ------------------------------------------------------------------------

def _neighbours(g: MSGraph, max_critical: int | None) -> Iterator[tuple[MoveInstance, MSGraph]]:
    grow = max_critical is None or g.n_vertices + 2 <= max_critical
    for mv in enumerate_moves(g, additions=grow, _checked=True):
        yield mv, apply_move(g, mv, _checked=True)


def connect(g: MSGraph, h: MSGraph, max_depth: int, max_critical: int | None = None) -> list[MoveInstance] | None:
    """Shortest move sequence turning ``g`` into a map isomorphic to ``h`` (bidirectional BFS).

    ``max_critical`` optionally bounds the number of critical points of every
    intermediate map.  Returns None when no sequence of length <= max_depth exists.
    """
    check_valid(g)
    check_valid(h)
    cg, ch = _code(g), _code(h)
    if cg == ch:
        return []
    sides = [
        {"parent": {cg: None}, "rep": {cg: g}, "frontier": [cg], "depth": 0},
        {"parent": {ch: None}, "rep": {ch: h}, "frontier": [ch], "depth": 0},
    ]
    while sides[0]["depth"] + sides[1]["depth"] < max_depth:
        live = [s for s in (0, 1) if sides[s]["frontier"]]
        if not live:
            return None
        which = min(live, key=lambda s: (len(sides[s]["frontier"]), s))
        side, other = sides[which], sides[1 - which]
        nxt: list[CanonicalCode] = []
        meets: list[CanonicalCode] = []
        for code in sorted(side["frontier"]):
            for mv, out in _neighbours(side["rep"][code], max_critical):
                c = _code(out)
                if c in side["parent"]:
                    continue
                side["parent"][c] = (code, mv)
                side["rep"][c] = out
                nxt.append(c)
                if c in other["parent"]:
                    meets.append(c)
        side["frontier"] = nxt
        side["depth"] += 1
        if meets:
            return _stitch(sides, min(meets), max_critical)
    return None


def _stitch(sides, meet: CanonicalCode, max_critical: int | None) -> list[MoveInstance]:
    fwd, back = sides
    moves: list[MoveInstance] = []
    c = meet
    while fwd["parent"][c] is not None:
        prev, mv = fwd["parent"][c]
        moves.append(mv)
        c = prev
    moves.reverse()
    # replay the backward half on the actual graph reached from g
    cur = fwd["rep"][meet]
    c = meet
    while back["parent"][c] is not None:
        target = back["parent"][c][0]
        for mv, out in _neighbours(cur, max_critical):
            if _code(out) == target:
                moves.append(mv)
                cur = out
                break
        else:  # pragma: no cover - moves are invertible, so this cannot happen
            raise InvalidGraphError("failed to replay backward half of the search")
        c = target
    return moves


def apply_sequence(g: MSGraph, moves: list[MoveInstance]) -> MSGraph:
    for mv in moves:
        g = apply_move(g, mv)
    return g


def census(g: MSGraph, n_max: int) -> dict[CanonicalCode, MSGraph]:
    """Representatives of all maps reachable from ``g`` by additions within ``n_max`` critical points."""
    check_valid(g)
    reps = {_code(g): g}
    queue = deque([g])
    while queue:
        cur = queue.popleft()
        if cur.n_vertices + 2 > n_max:
            continue
        for mv in enumerate_moves(cur, cancellations=False, _checked=True):
            out = apply_move(cur, mv, _checked=True)
            c = _code(out)
            if c not in reps:
                reps[c] = out
                queue.append(out)
    return reps


def reachable_codes(g: MSGraph, n_max: int) -> set[CanonicalCode]:
    if n_max < g.n_vertices:
        raise ValueError("n_max must be at least the number of critical points of g")
    return set(census(g, n_max))
