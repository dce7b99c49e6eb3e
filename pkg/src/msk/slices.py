"""Height-embedded spheres as event histories acting on nesting forests of level-set circles."""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .barcode import LEVELSET, Bar, Barcode, Endpoint

OUTER = "OUTER"
EVENT_KINDS = ("min", "max", "merge_nn", "merge_n", "split_nn", "split_n")
GALOIS_CAVEAT = "the adjoint view does not capture splitting saddles"


class EventError(ValueError):
    """Event not applicable to the forest, or a history that is not a sphere."""


# ---- forests and posets --------------------------------------------------------------

@dataclass(frozen=True)
class NestingForest:
    """Circles with parents; OUTER is the root and never a circle."""

    parent: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        par = dict(sorted(self.parent.items()))
        if OUTER in par:
            raise EventError("OUTER cannot be a circle")
        for c, p in par.items():
            if p != OUTER and p not in par:
                raise EventError(f"circle {c} has unknown parent {p}")
        for c in par:
            seen = {c}
            p = par[c]
            while p != OUTER:
                if p in seen:
                    raise EventError(f"parent relation has a cycle through {c}")
                seen.add(p)
                p = par[p]
        object.__setattr__(self, "parent", par)

    @property
    def circles(self) -> list[str]:
        return list(self.parent)

    def __len__(self) -> int:
        return len(self.parent)

    def children(self, x: str) -> list[str]:
        return [c for c, p in self.parent.items() if p == x]

    def child_map(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {OUTER: []}
        for c in self.parent:
            out[c] = []
        for c, p in self.parent.items():
            out[p].append(c)
        return out

    def with_parents(self, updates: Mapping[str, str], drop: Iterable[str] = ()) -> NestingForest:
        par = {c: p for c, p in self.parent.items() if c not in set(drop)}
        par.update(updates)
        return NestingForest(par)


@dataclass(frozen=True)
class NestingPoset:
    """Regions ordered by containment; ``up[x]`` is the region directly enclosing x."""

    elements: tuple[str, ...]
    up: Mapping[str, str]

    def le(self, x: str, y: str) -> bool:
        while True:
            if x == y:
                return True
            if x == OUTER:
                return False
            x = self.up[x]

    def children(self, x: str) -> list[str]:
        return sorted(c for c, p in self.up.items() if p == x)

    def __len__(self) -> int:
        return len(self.elements)

    def hasse_edges(self) -> list[tuple[str, str]]:
        return sorted(self.up.items())

    def to_dot(self, name: str = "hasse") -> str:
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for x in self.elements:
            label = "p0" if x == OUTER else x
            lines.append(f'  "{x}" [label="{label}"];')
        for x, y in self.hasse_edges():
            lines.append(f'  "{x}" -> "{y}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def nesting_poset(f: NestingForest) -> NestingPoset:
    """Region directly inside each circle, plus the unbounded region OUTER on top."""
    return NestingPoset(tuple([OUTER] + f.circles), dict(f.parent))


def tree_code(children: Mapping[str, Sequence[str]], root: str, label: Mapping[str, str] | None = None) -> str:
    """AHU code of an unordered rooted tree; optional node labels take part in the code."""
    memo: dict[str, str] = {}
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            inner = "".join(sorted(memo[c] for c in children.get(v, ())))
            memo[v] = "(" + (label.get(v, "") if label else "") + inner + ")"
        else:
            stack.append((v, True))
            stack.extend((c, False) for c in children.get(v, ()))
    return memo[root]


def poset_code(p: NestingPoset) -> str:
    ch: dict[str, list[str]] = {x: [] for x in p.elements}
    for x, y in p.up.items():
        ch[y].append(x)
    return tree_code(ch, OUTER)


def poset_isomorphic(p: NestingPoset, q: NestingPoset) -> bool:
    return len(p) == len(q) and poset_code(p) == poset_code(q)


# ---- events ---------------------------------------------------------------------------

_REQUIRED = {
    "min": ("region", "circle"),
    "max": ("circle",),
    "merge_nn": ("a", "b", "into"),
    "merge_n": ("outer", "inner", "into"),
    "split_nn": ("circle", "into", "children"),
    "split_n": ("circle", "outer", "inner", "siblings"),
}


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    args: Mapping[str, Any]

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise EventError(f"unknown event kind {self.kind!r}")
        missing = [k for k in _REQUIRED[self.kind] if k not in self.args]
        if missing:
            raise EventError(f"{self.kind} event lacks {', '.join(missing)}")

    def created(self) -> list[str]:
        a = self.args
        return {
            "min": lambda: [a["circle"]],
            "max": lambda: [],
            "merge_nn": lambda: [a["into"]],
            "merge_n": lambda: [a["into"]],
            "split_nn": lambda: list(a["into"]),
            "split_n": lambda: [a["outer"], a["inner"]],
        }[self.kind]()

    def destroyed(self) -> list[str]:
        a = self.args
        return {
            "min": lambda: [],
            "max": lambda: [a["circle"]],
            "merge_nn": lambda: [a["a"], a["b"]],
            "merge_n": lambda: [a["outer"], a["inner"]],
            "split_nn": lambda: [a["circle"]],
            "split_n": lambda: [a["circle"]],
        }[self.kind]()

    def to_dict(self) -> dict[str, Any]:
        args = {k: (sorted(v) if k in ("children", "siblings") else list(v) if isinstance(v, (list, tuple)) else v)
                for k, v in self.args.items()}
        return {"t": self.t, "kind": self.kind, "args": args}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Event:
        try:
            return cls(data["t"], data["kind"], dict(data.get("args", {})))
        except KeyError as exc:
            raise EventError(f"event lacks {exc}") from None


def apply_event(f: NestingForest, e: Event) -> NestingForest:
    a = e.args
    par = f.parent
    ch = f.child_map()

    def need_circle(c: str, role: str) -> None:
        if c not in par:
            raise EventError(f"{e.kind}: {role} {c!r} is not a live circle")

    def need_fresh(*cs: str) -> None:
        for c in cs:
            if c in par or c == OUTER:
                raise EventError(f"{e.kind}: new circle id {c!r} is already in use")
        if len(set(cs)) != len(cs):
            raise EventError(f"{e.kind}: new circle ids must differ")

    if e.kind == "min":
        r, c = a["region"], a["circle"]
        if r != OUTER:
            need_circle(r, "region")
        need_fresh(c)
        return f.with_parents({c: r})
    if e.kind == "max":
        c = a["circle"]
        need_circle(c, "circle")
        if ch[c]:
            raise EventError(f"max: circle {c} still has children")
        return f.with_parents({}, drop=[c])
    if e.kind == "merge_nn":
        x, y, m = a["a"], a["b"], a["into"]
        need_circle(x, "a")
        need_circle(y, "b")
        if x == y or par[x] != par[y]:
            raise EventError(f"merge_nn: {x} and {y} are not siblings")
        need_fresh(m)
        upd = {m: par[x]}
        upd.update({c: m for c in ch[x] + ch[y]})
        return f.with_parents(upd, drop=[x, y])
    if e.kind == "merge_n":
        o, i, m = a["outer"], a["inner"], a["into"]
        need_circle(o, "outer")
        need_circle(i, "inner")
        if par[i] != o:
            raise EventError(f"merge_n: {i} is not a child of {o}")
        need_fresh(m)
        upd = {m: par[o]}
        upd.update({c: m for c in ch[o] if c != i})
        upd.update({c: par[o] for c in ch[i]})
        return f.with_parents(upd, drop=[o, i])
    if e.kind == "split_nn":
        c = a["circle"]
        need_circle(c, "circle")
        into = list(a["into"])
        if len(into) != 2:
            raise EventError("split_nn: 'into' must name two circles")
        need_fresh(*into)
        part = set(a["children"])
        if not part <= set(ch[c]):
            raise EventError(f"split_nn: {sorted(part - set(ch[c]))} are not children of {c}")
        upd = {into[0]: par[c], into[1]: par[c]}
        upd.update({k: into[0] if k in part else into[1] for k in ch[c]})
        return f.with_parents(upd, drop=[c])
    # split_n
    c, o, i = a["circle"], a["outer"], a["inner"]
    need_circle(c, "circle")
    need_fresh(o, i)
    sibs = set(a["siblings"])
    if not sibs <= set(ch[par[c]]) - {c}:
        raise EventError(f"split_n: {sorted(sibs)} are not all siblings of {c}")
    upd = {o: par[c], i: o}
    upd.update({k: o for k in ch[c]})
    upd.update({k: i for k in sibs})
    return f.with_parents(upd, drop=[c])


def inverse_event(before: NestingForest, e: Event, t: float | None = None) -> Event:
    """An event undoing ``e`` on ``apply_event(before, e)`` and restoring the original ids."""
    a = e.args
    t = e.t if t is None else t
    ch = before.child_map()
    if e.kind == "min":
        return Event(t, "max", {"circle": a["circle"]})
    if e.kind == "max":
        return Event(t, "min", {"region": before.parent[a["circle"]], "circle": a["circle"]})
    if e.kind == "merge_nn":
        return Event(t, "split_nn", {"circle": a["into"], "into": [a["a"], a["b"]], "children": ch[a["a"]]})
    if e.kind == "merge_n":
        o, i = a["outer"], a["inner"]
        return Event(t, "split_n", {"circle": a["into"], "outer": o, "inner": i, "siblings": ch[i]})
    if e.kind == "split_nn":
        x, y = a["into"]
        return Event(t, "merge_nn", {"a": x, "b": y, "into": a["circle"]})
    return Event(t, "merge_n", {"outer": a["outer"], "inner": a["inner"], "into": a["circle"]})


# ---- histories --------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingHistory:
    events: tuple[Event, ...]

    def __post_init__(self) -> None:
        evs = tuple(sorted(self.events, key=lambda e: e.t))
        object.__setattr__(self, "events", evs)
        times = [e.t for e in evs]
        if len(set(times)) != len(times):
            raise EventError("event times must be distinct")
        if not evs or evs[0].kind != "min" or evs[0].args.get("region") != OUTER:
            raise EventError("the first event must be a min in OUTER")
        forests = [NestingForest()]
        used: set[str] = set()
        for e in evs:
            for c in e.created():
                if c in used:
                    raise EventError(f"circle id {c} is reused")
                used.add(c)
            forests.append(apply_event(forests[-1], e))
        if len(forests[-1]):
            raise EventError("forest must be empty after the last event")
        object.__setattr__(self, "_forests", tuple(forests))
        check_sphere(evs)

    @property
    def times(self) -> list[float]:
        return [e.t for e in self.events]

    @property
    def forests(self) -> tuple[NestingForest, ...]:
        """``forests[i]`` holds just after event i-1; ``forests[0]`` is empty."""
        return self._forests  # type: ignore[attr-defined]

    def forest_at(self, x: float) -> NestingForest:
        if x in self.times:
            raise ValueError(f"{x} is an event time")
        return self.forests[sum(1 for t in self.times if t < x)]

    def to_dict(self) -> dict[str, Any]:
        return {"events": [e.to_dict() for e in self.events]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> EmbeddingHistory:
        if not isinstance(data, Mapping) or not isinstance(data.get("events"), list):
            raise EventError("history must be an object with an 'events' list")
        return cls(tuple(Event.from_dict(e) for e in data["events"]))

    def renamed(self, names: Mapping[str, str]) -> EmbeddingHistory:
        def rn(v: Any) -> Any:
            if isinstance(v, str):
                return names.get(v, v)
            return [rn(x) for x in v]

        return EmbeddingHistory(tuple(Event(e.t, e.kind, {k: rn(v) for k, v in e.args.items()}) for e in self.events))


def check_sphere(events: Sequence[Event]) -> None:
    """The graph of events joined by circle lifetimes must be a tree (connected, genus 0)."""
    born: dict[str, int] = {}
    parent = list(range(len(events)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    n_edges = 0
    for i, e in enumerate(events):
        for c in e.destroyed():
            j = born.pop(c)
            n_edges += 1
            ri, rj = find(i), find(j)
            if ri == rj:
                raise EventError(f"event at t={e.t} closes a loop: the surface is not a sphere")
            parent[ri] = rj
        for c in e.created():
            born[c] = i
    if n_edges != len(events) - 1:
        raise EventError("events form more than one surface")


# ---- zigzag ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Arrow:
    event: int
    side: str                   # "left" (towards the earlier slice) or "right"
    source: int                 # node positions in the diagram
    target: int
    mapping: Mapping[str, str]
    injective: bool
    surjective: bool
    iso: bool
    monotone: bool

    @property
    def outward(self) -> bool:
        """True when the arrow leaves the critical node."""
        return self.source % 2 == 1


@dataclass(frozen=True)
class ZigzagDiagram:
    values: tuple[float, ...]
    nodes: tuple[NestingPoset, ...]
    arrows: tuple[Arrow, ...]

    def arrows_at(self, event: int) -> tuple[Arrow, Arrow]:
        left = next(a for a in self.arrows if a.event == event and a.side == "left")
        right = next(a for a in self.arrows if a.event == event and a.side == "right")
        return left, right

    def galois_view(self) -> tuple[list[dict[str, Any]], str]:
        """Reverse every arrow pointing into a critical node by ``y -> max{x : f(x) <= y}``."""
        out = []
        for a in self.arrows:
            if a.outward:
                continue
            src, tgt = self.nodes[a.source], self.nodes[a.target]
            adj: dict[str, str | None] = {}
            for y in tgt.elements:
                below = [x for x in src.elements if tgt.le(a.mapping[x], y)]
                tops = [x for x in below if not any(x != z and src.le(x, z) for z in below)]
                adj[y] = tops[0] if len(tops) == 1 else None
            out.append({"event": a.event, "source": a.target, "target": a.source, "mapping": adj})
        return out, GALOIS_CAVEAT


def _arrow(nodes: Sequence[NestingPoset], event: int, side: str, source: int, target: int,
           mapping: Mapping[str, str]) -> Arrow:
    src, tgt = nodes[source], nodes[target]
    mapping = dict(mapping)
    image = set(mapping.values())
    injective = len(image) == len(mapping)
    surjective = image == set(tgt.elements)
    monotone = all(tgt.le(mapping[x], mapping[y]) for x in src.elements for y in src.elements if src.le(x, y))
    reflects = all(src.le(x, y) == tgt.le(mapping[x], mapping[y]) for x in src.elements for y in src.elements)
    return Arrow(event, side, source, target, mapping, injective, surjective,
                 injective and surjective and reflects, monotone)


def check_event_slicing(times: Sequence[float], slicing: Sequence[float]) -> None:
    if len(slicing) != len(times) + 1:
        raise ValueError(f"slicing needs {len(times) + 1} values, got {len(slicing)}")
    for i, t in enumerate(times):
        if not slicing[i] < t < slicing[i + 1]:
            raise ValueError(f"slicing gap ({slicing[i]}, {slicing[i + 1]}) must contain exactly the event at {t}")


def canonical_event_slicing(h: EmbeddingHistory) -> list[float]:
    ts = h.times
    return [ts[0] - 1] + [(x + y) / 2 for x, y in zip(ts, ts[1:])] + [ts[-1] + 1]


def zigzag(h: EmbeddingHistory, slicing: Sequence[float] | None = None) -> ZigzagDiagram:
    """Posets at slicing values and event times joined by the element maps of each event."""
    slicing = canonical_event_slicing(h) if slicing is None else list(slicing)
    check_event_slicing(h.times, slicing)
    values: list[float] = [slicing[0]]
    nodes: list[NestingPoset] = [nesting_poset(h.forests[0])]
    arrows: list[Arrow] = []
    for k, e in enumerate(h.events):
        before, after = nesting_poset(h.forests[k]), nesting_poset(h.forests[k + 1])
        a = e.args
        iso_before = e.kind in ("min", "merge_nn", "merge_n")
        crit = before if iso_before else after
        values += [e.t, slicing[k + 1]]
        nodes += [crit, after]
        lo, mid, hi = 2 * k, 2 * k + 1, 2 * k + 2
        ident = {x: x for x in crit.elements}
        if e.kind in ("min", "max"):
            left = (mid, lo, ident)
            right = (mid, hi, ident)
        elif e.kind == "merge_nn":
            left = (mid, lo, ident)
            right = (mid, hi, {x: a["into"] if x in (a["a"], a["b"]) else x for x in crit.elements})
        elif e.kind == "split_nn":
            left = (mid, lo, {x: a["circle"] if x in a["into"] else x for x in crit.elements})
            right = (mid, hi, ident)
        elif e.kind == "merge_n":
            left = (mid, lo, ident)
            right = (hi, mid, {x: a["outer"] if x == a["into"] else x for x in after.elements})
        else:
            left = (lo, mid, {x: a["outer"] if x == a["circle"] else x for x in before.elements})
            right = (mid, hi, ident)
        arrows.append(_arrow(nodes, k, "left", *left))
        arrows.append(_arrow(nodes, k, "right", *right))
    return ZigzagDiagram(tuple(values), tuple(nodes), tuple(arrows))


# ---- level-set barcode ------------------------------------------------------------------

def _component_sweep(events: Sequence[Event], reverse: bool) -> list[tuple[float, float]]:
    """Pair each joining event with the younger joined component (elder rule).

    Sweeping upward the joins are merges and births are minima; sweeping
    downward the joins are splits and births are maxima.
    """
    order = list(reversed(events)) if reverse else list(events)
    birth_kind, join_kinds = ("max", ("split_nn", "split_n")) if reverse else ("min", ("merge_nn", "merge_n"))
    comp_of: dict[str, int] = {}
    birth: list[float] = []
    parent: list[int] = []

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = []
    for e in order:
        incoming = e.created() if reverse else e.destroyed()
        outgoing = e.destroyed() if reverse else e.created()
        if e.kind == birth_kind:
            parent.append(len(parent))
            birth.append(e.t)
            for c in outgoing:
                comp_of[c] = len(parent) - 1
            continue
        roots = sorted({find(comp_of.pop(c)) for c in incoming},
                       key=lambda r: -birth[r] if reverse else birth[r])
        if e.kind in join_kinds:
            if len(roots) != 2:
                raise EventError(f"event at t={e.t} joins a component to itself")
            elder, younger = roots
            pairs.append((birth[younger], e.t))
            parent[younger] = elder
        for c in outgoing:
            comp_of[c] = roots[0] if roots else None  # type: ignore[assignment]
    return pairs


def levelset_barcode(h: EmbeddingHistory) -> Barcode:
    """Bars of the level-set zigzag: [min, merge), (split, max], and one closed essential bar."""
    evs = h.events
    bars = [Bar(0, Endpoint(evs[0].t, True), Endpoint(evs[-1].t, True))]
    for b, d in _component_sweep(evs, reverse=False):
        bars.append(Bar(0, Endpoint(b, True), Endpoint(d, False)))
    for top, s in _component_sweep(evs, reverse=True):
        bars.append(Bar(0, Endpoint(s, False), Endpoint(top, True)))
    return Barcode(tuple(bars), LEVELSET)


def reeb_of_history(h: EmbeddingHistory):
    """Reeb tree: one node per event, one edge per circle lifetime."""
    from .trees import ReebGraph

    heights: dict[str, float] = {}
    born: dict[str, str] = {}
    edges = []
    for i, e in enumerate(h.events):
        node = f"x{i}"
        heights[node] = e.t
        for c in e.destroyed():
            edges.append((born.pop(c), node))
        for c in e.created():
            born[c] = node
    return ReebGraph.build(heights, edges)


# ---- canonical history code --------------------------------------------------------------

def _digest(*parts: Any) -> str:
    return hashlib.sha1(repr(parts).encode()).hexdigest()[:16]


class _Labelled:
    """Forest with structural labels that remember how each circle came to be."""

    def __init__(self, forest: NestingForest, labels: Mapping[str, str]):
        self.forest = forest
        self.labels = labels
        self.ch = forest.child_map()
        self._sub: dict[str, str] = {}
        self._pos: dict[str, str] = {}

    def sub(self, v: str) -> str:
        if v not in self._sub:
            inner = "".join(sorted(self.sub(c) for c in self.ch[v]))
            self._sub[v] = _digest(self.labels.get(v, "root"), inner)
        return self._sub[v]

    def pos(self, v: str) -> str:
        if v not in self._pos:
            above = "" if v == OUTER else self.pos(self.forest.parent[v])
            self._pos[v] = _digest(self.sub(v), above)
        return self._pos[v]

    def group(self, vs: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(self.sub(v) for v in vs))


class HistoryCoder:
    """Incremental canonical code: feed events in time order against the forest they act on."""

    def __init__(self, labels: Mapping[str, str] | None = None, code: tuple = ()):
        self.labels: dict[str, str] = dict(labels or {})
        self.code = code

    def step(self, forest: NestingForest, e: Event) -> HistoryCoder:
        labels = dict(self.labels)
        lf = _Labelled(forest, labels)
        a = e.args
        if e.kind == "min":
            desc: tuple = (lf.pos(a["region"]),)
            labels[a["circle"]] = _digest(e.t, "min", desc)
        elif e.kind == "max":
            desc = (lf.pos(a["circle"]),)
        elif e.kind == "merge_nn":
            desc = tuple(sorted((lf.pos(a["a"]), lf.pos(a["b"]))))
            labels[a["into"]] = _digest(e.t, "merge_nn", desc)
        elif e.kind == "merge_n":
            desc = (lf.pos(a["outer"]), lf.pos(a["inner"]))
            labels[a["into"]] = _digest(e.t, "merge_n", desc)
        elif e.kind == "split_nn":
            c = a["circle"]
            part = set(a["children"])
            mine = lf.group(x for x in lf.ch[c] if x in part)
            rest = lf.group(x for x in lf.ch[c] if x not in part)
            desc = (lf.pos(c),) + tuple(sorted((mine, rest)))
            labels[a["into"][0]] = _digest(e.t, "split_nn", lf.pos(c), mine, rest)
            labels[a["into"][1]] = _digest(e.t, "split_nn", lf.pos(c), rest, mine)
        else:
            c = a["circle"]
            desc = (lf.pos(c), tuple(sorted(lf.pos(x) for x in a["siblings"])))
            labels[a["outer"]] = _digest(e.t, "split_n/outer", desc)
            labels[a["inner"]] = _digest(e.t, "split_n/inner", desc)
        return HistoryCoder(labels, self.code + ((e.t, e.kind, desc),))


def history_code(h: EmbeddingHistory) -> tuple:
    """Equal codes iff the histories agree up to renaming circles consistently through time."""
    coder = HistoryCoder()
    for k, e in enumerate(h.events):
        coder = coder.step(h.forests[k], e)
    return coder.code


def poset_equivalent(h1: EmbeddingHistory, h2: EmbeddingHistory) -> bool:
    return sorted(h1.times) == sorted(h2.times) and history_code(h1) == history_code(h2)


def height_equivalence_necessary(h1: EmbeddingHistory, h2: EmbeddingHistory) -> bool:
    """Necessary condition only: same critical values and the same level-set barcode."""
    from .barcode import barcodes_equal

    return sorted(h1.times) == sorted(h2.times) and barcodes_equal(levelset_barcode(h1), levelset_barcode(h2))


# ---- experimental region tracking -----------------------------------------------------------

@dataclass(frozen=True)
class RegionInterval:
    region: str          # element name where the interval starts
    start: int           # first node position
    end: int             # last node position (inclusive)
    lo: float
    hi: float


def _upper_tops(h: EmbeddingHistory) -> dict[str, float]:
    """For every circle, the highest event time reachable upward through later events."""
    top: dict[str, float] = {}
    for e in reversed(h.events):
        reach = max([top[c] for c in e.created()], default=e.t)
        for c in e.destroyed():
            top[c] = reach
    return top


def combinatorial_barcode(h: EmbeddingHistory) -> tuple[list[RegionInterval], bool]:
    """Follow regions through the zigzag maps; when two regions collide the older one survives.

    The flag is True when every element of every node lies on exactly one
    interval and every interval is carried along by the arrows it crosses.
    """
    z = zigzag(h)
    tops = _upper_tops(h)
    starts: list[tuple[str, int]] = []
    ends: dict[int, int] = {}
    member: list[dict[str, int]] = [dict() for _ in z.nodes]

    def open_interval(x: str, node: int) -> int:
        starts.append((x, node))
        member[node][x] = len(starts) - 1
        return len(starts) - 1

    open_interval(OUTER, 0)
    for arrow in sorted(z.arrows, key=lambda a: min(a.source, a.target)):
        lo_node, hi_node = sorted((arrow.source, arrow.target))
        cur = member[lo_node]
        nxt = member[hi_node]
        fwd = arrow.source == lo_node
        if fwd:
            # carry lo elements forward along the map; collisions keep the older interval
            by_target: dict[str, list[str]] = {}
            for x, y in arrow.mapping.items():
                by_target.setdefault(y, []).append(x)
            for y, xs in by_target.items():
                keep = min(xs, key=lambda x: starts[cur[x]][1])
                nxt[y] = cur[keep]
                for x in xs:
                    if x != keep:
                        ends[cur[x]] = lo_node
        else:
            # elements of the later node map back; a fibre of size two hands on to one member
            back = arrow.mapping
            fibres: dict[str, list[str]] = {}
            for y, x in back.items():
                fibres.setdefault(x, []).append(y)
            for x, ys in fibres.items():
                heir = max(ys, key=lambda y: (tops.get(y, -float("inf")), y))
                nxt[heir] = cur[x]
            for y in z.nodes[hi_node].elements:
                if y not in nxt:
                    open_interval(y, hi_node)
        for x, iv in cur.items():
            if iv not in nxt.values() and iv not in ends:
                ends[iv] = lo_node
        for y in z.nodes[hi_node].elements:
            if y not in nxt:
                open_interval(y, hi_node)
    last = len(z.nodes) - 1
    out = []
    for iv, (x, s) in enumerate(starts):
        e = ends.get(iv, last)
        out.append(RegionInterval(x, s, e, z.values[s], z.values[e]))
    ok = all(sorted(m) == sorted(node.elements) and len(set(m.values())) == len(m)
             for m, node in zip(member, z.nodes))
    for arrow in z.arrows:
        src, tgt = member[arrow.source], member[arrow.target]
        for x, y in arrow.mapping.items():
            if src[x] in tgt.values() and tgt.get(y) != src[x]:
                ok = False
    return out, ok


# ---- random histories ---------------------------------------------------------------------

def random_history(rng: random.Random, max_events: int = 12) -> EmbeddingHistory:
    """A random sphere history with at most ``max_events`` events (at least 2)."""
    forest = NestingForest()
    comp: dict[str, int] = {}
    events: list[Event] = []
    counter = [0]
    n_comps = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"c{counter[0]}"

    def push(kind: str, args: dict[str, Any]) -> None:
        nonlocal forest
        e = Event(float(len(events) + 1), kind, args)
        forest = apply_event(forest, e)
        events.append(e)

    def new_comp() -> int:
        n_comps[0] += 1
        return n_comps[0]

    def relabel(old: int, new: int) -> None:
        for c in comp:
            if comp[c] == old:
                comp[c] = new

    def live_in(k: int) -> int:
        return sum(1 for c in forest.parent if comp[c] == k)

    def options() -> list[tuple[str, dict[str, Any]]]:
        opts: list[tuple[str, dict[str, Any]]] = []
        circles = forest.circles
        ch = forest.child_map()
        for r in [OUTER] + circles:
            opts.append(("min", {"region": r}))
        for c in circles:
            if not ch[c] and (live_in(comp[c]) >= 2 or len(circles) == 1):
                opts.append(("max", {"circle": c}))
            opts.append(("split_nn", {"circle": c}))
            opts.append(("split_n", {"circle": c}))
            p = forest.parent[c]
            for d in ch[p]:
                if c < d and comp[c] != comp[d]:
                    opts.append(("merge_nn", {"a": c, "b": d}))
            if p != OUTER and comp[p] != comp[c]:
                opts.append(("merge_n", {"outer": p, "inner": c}))
        return opts

    def do(kind: str, args: dict[str, Any]) -> None:
        ch = forest.child_map()
        if kind == "min":
            c = fresh()
            comp[c] = new_comp()
            push("min", {"region": args["region"], "circle": c})
        elif kind == "max":
            push("max", args)
            comp.pop(args["circle"])
        elif kind == "merge_nn":
            m = fresh()
            relabel(comp[args["b"]], comp[args["a"]])
            comp[m] = comp[args["a"]]
            push("merge_nn", {**args, "into": m})
        elif kind == "merge_n":
            m = fresh()
            relabel(comp[args["inner"]], comp[args["outer"]])
            comp[m] = comp[args["outer"]]
            push("merge_n", {**args, "into": m})
        elif kind == "split_nn":
            c = args["circle"]
            x, y = fresh(), fresh()
            part = [k for k in ch[c] if rng.random() < 0.5]
            comp[x] = comp[y] = comp[c]
            push("split_nn", {"circle": c, "into": [x, y], "children": part})
        else:
            c = args["circle"]
            o, i = fresh(), fresh()
            sibs = [k for k in ch[forest.parent[c]] if k != c and rng.random() < 0.5]
            comp[o] = comp[i] = comp[c]
            push("split_n", {"circle": c, "outer": o, "inner": i, "siblings": sibs})

    do("min", {"region": OUTER})
    target = rng.randint(2, max(2, max_events))
    while forest.parent and len(events) + len(forest.parent) < target:
        opts = options()
        budget = target - len(events) - len(forest.parent)
        opts = [o for o in opts if o[0] not in ("min", "split_nn", "split_n") or budget >= 2]
        do(*rng.choice(opts))
    # wind down: every step removes one live circle
    while forest.parent:
        ch = forest.child_map()
        leaves = [c for c in forest.circles if not ch[c]]
        maxable = [c for c in leaves if live_in(comp[c]) >= 2 or len(forest.parent) == 1]
        if maxable:
            do("max", {"circle": rng.choice(maxable)})
            continue
        c = rng.choice(leaves)
        p = forest.parent[c]
        if p != OUTER:
            do("merge_n", {"outer": p, "inner": c})
        else:
            d = rng.choice([s for s in ch[OUTER] if s != c])
            a, b = sorted((c, d))
            do("merge_nn", {"a": a, "b": b})
    times = sorted(rng.sample(range(1, 10 * len(events) + 1), len(events)))
    return EmbeddingHistory(tuple(Event(float(t), e.kind, e.args) for t, e in zip(times, events)))
