"""Morse-Smale graphs on the sphere stored as combinatorial maps.

A map is a set of darts (half-edges).  Edge ``k`` owns darts ``2k`` and
``2k + 1`` so the twin of dart ``d`` is ``d ^ 1``.  ``succ[d]`` is the next
dart counter-clockwise around the origin of ``d``.  Faces are the orbits of
``d -> succ[twin(d)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

MIN, SADDLE, MAX = 0, 1, 2
INDEX_NAMES = {MIN: "minimum", SADDLE: "saddle", MAX: "maximum"}
SADDLE_MAX = "saddle-max"
SADDLE_MIN = "saddle-min"
BASE_FACE = "base"


class MalformedGraphError(ValueError):
    """Encoding is not a well formed rotation system (dangling dart, unknown id, ...)."""


class InvalidGraphError(ValueError):
    """Encoding is well formed but violates a Morse-Smale invariant."""


@dataclass(frozen=True)
class CriticalVertex:
    id: str
    index: int


@dataclass(frozen=True)
class Face:
    """One face as a corner walk; ``darts[i]`` leaves ``corners[i]``."""

    darts: tuple[str, ...]
    corners: tuple[str, ...]
    indices: tuple[int, ...]

    @property
    def id(self) -> str:
        return self.darts[0] if self.darts else BASE_FACE

    @property
    def is_quadrangle(self) -> bool:
        if len(self.indices) != 4:
            return False
        pattern = (MIN, SADDLE, MAX, SADDLE)
        return any(self.indices[i:] + self.indices[:i] == pattern for i in range(4))


@dataclass
class ValidationReport:
    structural: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.structural and not self.violations

    def messages(self) -> list[str]:
        return [f"structural: {m}" for m in self.structural] + self.violations


@dataclass(frozen=True)
class MSGraph:
    vertex_ids: tuple[str, ...]
    indices: tuple[int, ...]
    origin: tuple[int, ...]
    succ: tuple[int, ...]
    edge_ids: tuple[str, ...]
    dart_ids: tuple[str, ...]

    # ---- basic queries -------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_darts(self) -> int:
        return len(self.origin)

    @property
    def n_edges(self) -> int:
        return len(self.edge_ids)

    @property
    def is_base(self) -> bool:
        return self.n_darts == 0

    @property
    def vertices(self) -> tuple[CriticalVertex, ...]:
        return tuple(CriticalVertex(v, i) for v, i in zip(self.vertex_ids, self.indices))

    @cached_property
    def vertex_pos(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertex_ids)}

    @cached_property
    def dart_pos(self) -> dict[str, int]:
        return {d: i for i, d in enumerate(self.dart_ids)}

    @cached_property
    def edge_pos(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.edge_ids)}

    @cached_property
    def rotations(self) -> tuple[tuple[int, ...], ...]:
        """Darts around each vertex in counter-clockwise order, starting at the smallest dart."""
        firsts: dict[int, int] = {}
        for d in range(self.n_darts):
            v = self.origin[d]
            if v not in firsts:
                firsts[v] = d
        rots: list[tuple[int, ...]] = []
        for v in range(self.n_vertices):
            if v not in firsts:
                rots.append(())
                continue
            start = firsts[v]
            cyc = [start]
            d = self.succ[start]
            while d != start:
                cyc.append(d)
                d = self.succ[d]
            rots.append(tuple(cyc))
        return tuple(rots)

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def target(self, d: int) -> int:
        return self.origin[d ^ 1]

    def index_of(self, vid: str) -> int:
        return self.indices[self.vertex_pos[vid]]

    def count_index(self, k: int) -> int:
        return sum(1 for i in self.indices if i == k)

    def edge_kind(self, e: int) -> str | None:
        ends = {self.indices[self.origin[2 * e]], self.indices[self.origin[2 * e + 1]]}
        if ends == {SADDLE, MAX}:
            return SADDLE_MAX
        if ends == {SADDLE, MIN}:
            return SADDLE_MIN
        return None

    @cached_property
    def face_orbits(self) -> tuple[tuple[int, ...], ...]:
        """Face walks as dart-index tuples, each starting at its smallest dart id."""
        seen = [False] * self.n_darts
        orbits: list[tuple[int, ...]] = []
        for d0 in range(self.n_darts):
            if seen[d0]:
                continue
            walk = []
            d = d0
            while not seen[d]:
                seen[d] = True
                walk.append(d)
                d = self.succ[d ^ 1]
            k = min(range(len(walk)), key=lambda i: self.dart_ids[walk[i]])
            orbits.append(tuple(walk[k:] + walk[:k]))
        orbits.sort(key=lambda w: self.dart_ids[w[0]])
        return tuple(orbits)

    # ---- serialization ---------------------------------------------------
    def to_dict(self, values: Mapping[str, float] | None = None) -> dict[str, Any]:
        verts = []
        for v, i in zip(self.vertex_ids, self.indices):
            entry: dict[str, Any] = {"id": v, "index": i}
            if values is not None and v in values:
                entry["value"] = values[v]
            verts.append(entry)
        rotations = {v: [self.dart_ids[d] for d in self.rotations[k]] for k, v in enumerate(self.vertex_ids)}
        darts = {self.dart_ids[d]: {"edge": self.edge_ids[d >> 1]} for d in range(self.n_darts)}
        edges = {}
        for k, e in enumerate(self.edge_ids):
            entry = {"ends": [self.dart_ids[2 * k], self.dart_ids[2 * k + 1]]}
            kind = self.edge_kind(k)
            if kind is not None:
                entry["kind"] = kind
            edges[e] = entry
        return {"vertices": verts, "rotations": rotations, "darts": darts, "edges": edges}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> MSGraph:
        graph, structural, _ = _parse(data)
        if structural:
            raise MalformedGraphError("; ".join(structural))
        assert graph is not None
        return graph


def _parse(data: Mapping[str, Any]) -> tuple[MSGraph | None, list[str], list[str]]:
    """Parse a graph mapping.  Returns (graph or None, structural errors, declared-kind mismatches)."""
    structural: list[str] = []
    if not isinstance(data, Mapping):
        return None, ["graph encoding must be an object"], []
    raw_vertices = data.get("vertices")
    if not isinstance(raw_vertices, list):
        return None, ["missing 'vertices' list"], []
    vertex_ids: list[str] = []
    indices: list[int] = []
    for entry in raw_vertices:
        if not isinstance(entry, Mapping) or "id" not in entry or "index" not in entry:
            structural.append(f"vertex entry {entry!r} lacks id or index")
            continue
        vid = str(entry["id"])
        if vid in vertex_ids:
            structural.append(f"duplicate vertex id {vid}")
            continue
        idx = entry["index"]
        if isinstance(idx, bool) or not isinstance(idx, int):
            structural.append(f"vertex {vid}: index {idx!r} is not an integer")
            continue
        vertex_ids.append(vid)
        indices.append(idx)
    vpos = {v: i for i, v in enumerate(vertex_ids)}
    rotations = data.get("rotations", {}) or {}
    darts = data.get("darts", {}) or {}
    edges = data.get("edges", {}) or {}
    if not isinstance(rotations, Mapping) or not isinstance(darts, Mapping) or not isinstance(edges, Mapping):
        return None, structural + ["rotations, darts and edges must be objects"], []

    edge_ids = [str(e) for e in edges]
    dart_ids: list[str] = []
    dart_pos: dict[str, int] = {}
    for k, e in enumerate(edge_ids):
        ends = edges[e].get("ends") if isinstance(edges[e], Mapping) else None
        if not isinstance(ends, list) or len(ends) != 2:
            structural.append(f"edge {e}: 'ends' must list two darts")
            ends = [f"?{e}a", f"?{e}b"]
        for end in ends:
            end = str(end)
            if end in dart_pos:
                structural.append(f"dart {end} is an end of two edges")
            dart_pos[end] = len(dart_ids)
            dart_ids.append(end)
            if end not in darts:
                structural.append(f"edge {e}: dangling dart {end}")
            elif str(darts[end].get("edge")) != e:
                structural.append(f"dart {end} names edge {darts[end].get('edge')!r}, not {e}")
    for d in darts:
        if str(d) not in dart_pos:
            structural.append(f"dart {d} is not an end of any edge")

    origin = [-1] * len(dart_ids)
    succ = [-1] * len(dart_ids)
    for v, cyc in rotations.items():
        v = str(v)
        if v not in vpos:
            structural.append(f"rotation for unknown vertex {v}")
            continue
        if not isinstance(cyc, list):
            structural.append(f"rotation of {v} must be a list")
            continue
        ds = []
        for d in cyc:
            d = str(d)
            if d not in dart_pos:
                structural.append(f"rotation of {v} names unknown dart {d}")
                continue
            p = dart_pos[d]
            if origin[p] != -1:
                structural.append(f"dart {d} appears in more than one rotation slot")
                continue
            origin[p] = vpos[v]
            ds.append(p)
        for i, p in enumerate(ds):
            succ[p] = ds[(i + 1) % len(ds)]
    for p, o in enumerate(origin):
        if o == -1:
            structural.append(f"dart {dart_ids[p]} is in no rotation")

    mismatches = []
    if not structural:
        g = MSGraph(tuple(vertex_ids), tuple(indices), tuple(origin), tuple(succ), tuple(edge_ids), tuple(dart_ids))
        for k, e in enumerate(edge_ids):
            declared = edges[e].get("kind")
            if declared is not None and declared != g.edge_kind(k):
                mismatches.append(f"edge {e}: declared kind {declared} does not match its endpoints")
        return g, [], mismatches
    return None, structural, []


# ---- validation -------------------------------------------------------------

def validate(g: MSGraph | Mapping[str, Any]) -> ValidationReport:
    """Check every Morse-Smale invariant; an empty report means valid."""
    report = ValidationReport()
    if not isinstance(g, MSGraph):
        parsed, structural, mismatches = _parse(g)
        report.structural.extend(structural)
        report.violations.extend(mismatches)
        if parsed is None:
            return report
        g = parsed
    viol = report.violations
    for v, i in zip(g.vertex_ids, g.indices):
        if i not in (MIN, SADDLE, MAX):
            viol.append(f"vertex {v}: index {i} not in {{0,1,2}}")
    if g.is_base:
        if sorted(g.indices) != [MIN, MAX]:
            viol.append("a map without edges must be the base sphere (one minimum, one maximum)")
        return report

    for k, e in enumerate(g.edge_ids):
        a, b = g.indices[g.origin[2 * k]], g.indices[g.origin[2 * k + 1]]
        if {a, b} == {MIN, MAX}:
            viol.append(f"edge {e}: forbidden minimum-maximum edge")
        elif g.edge_kind(k) is None:
            viol.append(f"edge {e}: does not join a saddle to an extremum")
    for v in range(g.n_vertices):
        rot = g.rotations[v]
        if not rot:
            viol.append(f"vertex {g.vertex_ids[v]}: isolated vertex (map disconnected)")
        if g.indices[v] != SADDLE:
            continue
        if len(rot) != 4:
            viol.append(f"saddle {g.vertex_ids[v]}: saddle degree {len(rot)} != 4")
            continue
        kinds = [g.indices[g.target(d)] for d in rot]
        if kinds not in ([MAX, MIN, MAX, MIN], [MIN, MAX, MIN, MAX]):
            viol.append(f"saddle {g.vertex_ids[v]}: rotation does not alternate saddle-max/saddle-min")
    chi = euler_characteristic(g)
    if chi != 2:
        viol.append(f"Euler count #min - #saddle + #max = {chi} != 2")
    if _components(g) > 1:
        viol.append("map is disconnected")
    for f in faces(g):
        if not f.is_quadrangle:
            viol.append(f"face {f.id}: corner indices {f.indices} are not a quadrangle (0,1,2,1)")
    return report


def check_valid(g: MSGraph) -> None:
    report = validate(g)
    if not report.ok:
        raise InvalidGraphError("; ".join(report.messages()))


def _components(g: MSGraph) -> int:
    parent = list(range(g.n_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(g.n_edges):
        a, b = find(g.origin[2 * k]), find(g.origin[2 * k + 1])
        if a != b:
            parent[a] = b
    return len({find(v) for v in range(g.n_vertices)})


def faces(g: MSGraph) -> list[Face]:
    if g.is_base:
        return [Face((), tuple(g.vertex_ids), tuple(g.indices))]
    out = []
    for walk in g.face_orbits:
        corners = tuple(g.vertex_ids[g.origin[d]] for d in walk)
        out.append(Face(tuple(g.dart_ids[d] for d in walk), corners, tuple(g.indices[g.origin[d]] for d in walk)))
    return out


def euler_characteristic(g: MSGraph) -> int:
    return g.count_index(MIN) - g.count_index(SADDLE) + g.count_index(MAX)


# ---- canonical form --------------------------------------------------------

CanonicalCode = tuple


def _dart_invariant(g: MSGraph, d: int, degs: Sequence[int]) -> tuple[int, int, int, int]:
    o, t = g.origin[d], g.target(d)
    return (g.indices[o], degs[o], g.indices[t], degs[t])


def _rooted_code(n: int, succ: Sequence[int], origin: Sequence[int], idx: Sequence[int], root: int,
                 best: Sequence[int] | None) -> list[int] | None:
    """BFS relabeling from ``root``; returns None once the code is known to exceed ``best``."""
    label = [-1] * n
    order = [root]
    label[root] = 0
    out: list[int] = []
    tied = best is not None
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        for nb in (d ^ 1, succ[d]):
            if label[nb] < 0:
                label[nb] = len(order)
                order.append(nb)
        row = (label[d ^ 1], label[succ[d]], idx[origin[d]])
        if tied:
            ref = tuple(best[3 * (i - 1): 3 * i])
            if row > ref:
                return None
            if row < ref:
                tied = False
        out.extend(row)
    return out


def _code(g: MSGraph, mirror: bool = False) -> CanonicalCode:
    if g.is_base:
        return (g.n_vertices, 0) + tuple(sorted(g.indices))
    succ = g.succ
    if mirror:
        pred = [0] * g.n_darts
        for d, s in enumerate(succ):
            pred[s] = d
        succ = tuple(pred)
    degs = [len(r) for r in g.rotations]
    classes: dict[tuple, list[int]] = {}
    for d in range(g.n_darts):
        classes.setdefault(_dart_invariant(g, d, degs), []).append(d)
    key = min(classes, key=lambda c: (len(classes[c]), c))
    best: list[int] | None = None
    for root in classes[key]:
        out = _rooted_code(g.n_darts, succ, g.origin, g.indices, root, best)
        if out is not None and (best is None or out < best):
            best = out
    assert best is not None
    return (g.n_vertices, g.n_darts, key) + tuple(best)


def canonical_code(g: MSGraph, mirror: bool = False) -> CanonicalCode:
    """Relabeling-invariant code; equal codes iff orientation-preserving map isomorphism.

    With ``mirror=True`` the code of the reflected map is returned.
    """
    check_valid(g)
    return _code(g, mirror)


def is_isomorphic(g: MSGraph, h: MSGraph, orientation_reversing: bool = False) -> bool:
    cg = canonical_code(g)
    if cg == canonical_code(h):
        return True
    return orientation_reversing and cg == canonical_code(h, mirror=True)


def relabel(g: MSGraph, vmap: Mapping[str, str] | None = None, dmap: Mapping[str, str] | None = None,
            emap: Mapping[str, str] | None = None, order: Sequence[int] | None = None) -> MSGraph:
    """Rename ids and optionally reorder edges (``order`` is a permutation of edge indices)."""
    vmap = vmap or {}
    dmap = dmap or {}
    emap = emap or {}
    data = g.to_dict()
    if order is not None:
        names = list(data["edges"])
        data["edges"] = {names[k]: data["edges"][names[k]] for k in order}
    rn_v = lambda v: vmap.get(v, v)
    rn_d = lambda d: dmap.get(d, d)
    rn_e = lambda e: emap.get(e, e)
    out = {
        "vertices": [{"id": rn_v(x["id"]), "index": x["index"]} for x in data["vertices"]],
        "rotations": {rn_v(v): [rn_d(d) for d in ds] for v, ds in data["rotations"].items()},
        "darts": {rn_d(d): {"edge": rn_e(x["edge"])} for d, x in data["darts"].items()},
        "edges": {rn_e(e): {"ends": [rn_d(d) for d in x["ends"]]} for e, x in data["edges"].items()},
    }
    return MSGraph.from_dict(out)


# ---- construction helpers --------------------------------------------------

def base_sphere(min_id: str = "m", max_id: str = "M") -> MSGraph:
    return MSGraph((min_id, max_id), (MIN, MAX), (), (), (), ())


def from_planar_embedding(
    indices: Mapping[str, int],
    edges: Iterable[tuple[str, str, float, float]],
    outer: str | None = None,
) -> MSGraph:
    """Build a map from a straight-line-ish drawing.

    Each edge is ``(u, v, angle_at_u, angle_at_v)`` with angles in degrees giving
    the direction in which the edge leaves each endpoint.  For the vertex
    ``outer`` (the point at infinity) the angle is instead the position on a
    large boundary circle; its rotation runs in decreasing angle.
    """
    vids = list(indices)
    vpos = {v: i for i, v in enumerate(vids)}
    origin: list[int] = []
    angle: list[float] = []
    edge_ids = []
    for k, (u, v, au, av) in enumerate(edges):
        edge_ids.append(f"e{k}")
        origin += [vpos[u], vpos[v]]
        angle += [au % 360.0, av % 360.0]
    succ = [0] * len(origin)
    for vi, v in enumerate(vids):
        ds = [d for d in range(len(origin)) if origin[d] == vi]
        ds.sort(key=lambda d: -angle[d] if v == outer else angle[d])
        for i, d in enumerate(ds):
            succ[d] = ds[(i + 1) % len(ds)]
    dart_ids = tuple(f"d{d}" for d in range(len(origin)))
    return MSGraph(tuple(vids), tuple(indices[v] for v in vids), tuple(origin), tuple(succ), tuple(edge_ids), dart_ids)


def direction(p: tuple[float, float], q: tuple[float, float]) -> float:
    """Angle in degrees of the segment from p towards q."""
    return math.degrees(math.atan2(q[1] - p[1], q[0] - p[0])) % 360.0


# ---- rendering ---------------------------------------------------------------

DEFAULT_STYLES = {SADDLE_MAX: "solid", SADDLE_MIN: "dashed"}


def to_dot(g: MSGraph, values: Mapping[str, float] | None = None, styles: Mapping[str, str] | None = None,
           name: str = "msgraph") -> str:
    """DOT text; saddle-max edges solid and saddle-min edges dashed unless ``styles`` overrides."""
    styles = {**DEFAULT_STYLES, **(styles or {})}
    shapes = {MIN: "circle", SADDLE: "diamond", MAX: "doublecircle"}
    lines = [f"graph {name} {{"]
    for v, i in zip(g.vertex_ids, g.indices):
        label = v if values is None or v not in values else f"{v}\\n{values[v]:g}"
        lines.append(f'  "{v}" [shape={shapes.get(i, "box")}, label="{label}"];')
    for k, e in enumerate(g.edge_ids):
        a, b = g.vertex_ids[g.origin[2 * k]], g.vertex_ids[g.origin[2 * k + 1]]
        style = styles.get(g.edge_kind(k) or "", "dotted")
        lines.append(f'  "{a}" -- "{b}" [style={style}, label="{e}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

