"""Command-line front end.  Exit codes: 0 success, 1 domain rejection, 2 malformed input or usage."""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import moves as mv
from . import persistence as ps
from . import realize as rz
from . import slices as sl
from .barcode import Barcode, BarcodeFormatError
from .complex import InvalidGraphError, MalformedGraphError, MSGraph, to_dot, validate
from .trees import ReebGraph


class Malformed(Exception):
    """Input that does not parse against the file schemas."""


class Rejected(Exception):
    """Well formed input refused by a library operation."""


# ---- input helpers ------------------------------------------------------------------

def _read_json(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise Malformed(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise Malformed(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _graph(path: str) -> MSGraph:
    data = _read_json(path)
    try:
        g = MSGraph.from_dict(data)
    except MalformedGraphError as exc:
        raise Malformed(f"{path}: {exc}") from None
    report = validate(data)
    if not report.ok:
        raise Rejected(f"{path}: " + "; ".join(report.messages()))
    return g


def _decorated(path: str) -> ps.DecoratedMSGraph:
    g = _graph(path)
    data = _read_json(path)
    values = {str(x["id"]): x["value"] for x in data["vertices"] if "value" in x}
    try:
        return ps.DecoratedMSGraph(g, values)
    except ps.DecorationError as exc:
        raise Rejected(f"{path}: {exc}") from None


def _history(path: str) -> sl.EmbeddingHistory:
    data = _read_json(path)
    if not isinstance(data, dict) or not isinstance(data.get("events"), list):
        raise Malformed(f"{path}: history must be an object with an 'events' list")
    try:
        events = tuple(sl.Event.from_dict(e) for e in data["events"])
    except (sl.EventError, TypeError, AttributeError) as exc:
        raise Malformed(f"{path}: {exc}") from None
    try:
        return sl.EmbeddingHistory(events)
    except sl.EventError as exc:
        raise Rejected(f"{path}: {exc}") from None


def _barcode(path: str) -> Barcode:
    try:
        return Barcode.from_dict(_read_json(path))
    except BarcodeFormatError as exc:
        raise Malformed(f"{path}: {exc}") from None


def _move(raw: str) -> mv.MoveInstance:
    text = raw
    if not raw.lstrip().startswith("{"):
        try:
            text = Path(raw).read_text()
        except OSError as exc:
            raise Malformed(f"cannot read move file {raw}: {exc.strerror}") from None
    try:
        return mv.MoveInstance.from_dict(json.loads(text))
    except (json.JSONDecodeError, mv.MoveError, AttributeError) as exc:
        raise Malformed(f"bad move {raw!r}: {exc}") from None


# ---- output --------------------------------------------------------------------------------

class Out:
    def __init__(self, args: argparse.Namespace):
        self.json = getattr(args, "json", False)
        self.quiet = getattr(args, "quiet", False)
        self.dot = getattr(args, "dot", False)

    def emit(self, payload: Any, text: str | Callable[[], str]) -> None:
        if self.json:
            sys.stdout.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        elif not self.quiet:
            body = text() if callable(text) else text
            sys.stdout.write(body if body.endswith("\n") else body + "\n")

    def emit_dot(self, dot: str) -> None:
        sys.stdout.write(dot)


def _bars_text(b: Barcode) -> str:
    return f"{b.flavor}: {b}"


# ---- verbs ------------------------------------------------------------------------------------

def cmd_validate(a, out: Out) -> int:
    data = _read_json(a.file)
    report = validate(data)
    if report.structural:
        raise Malformed("; ".join(report.structural))
    payload = {"valid": report.ok, "violations": report.violations}
    if report.ok:
        out.emit(payload, "valid")
        return 0
    out.emit(payload, "invalid\n" + "\n".join(f"  {m}" for m in report.violations))
    return 1


def cmd_moves_enum(a, out: Out) -> int:
    ms = mv.enumerate_moves(_graph(a.file))
    out.emit([m.to_dict() for m in ms], "\n".join(str(m) for m in ms) or "(no moves)")
    return 0


def cmd_moves_apply(a, out: Out) -> int:
    g = _graph(a.file)
    try:
        h = mv.apply_move(g, _move(a.move))
    except mv.MoveError as exc:
        raise Rejected(str(exc)) from None
    if out.dot:
        out.emit_dot(to_dot(h))
    else:
        sys.stdout.write(json.dumps(h.to_dict(), indent=1, sort_keys=True) + "\n")
    return 0


def cmd_moves_connect(a, out: Out) -> int:
    g, h = _graph(a.first), _graph(a.second)
    seq = mv.connect(g, h, a.max_depth, max_critical=a.max_critical)
    if seq is None:
        raise Rejected(f"no move sequence of length <= {a.max_depth}")
    out.emit([m.to_dict() for m in seq], lambda: f"{len(seq)} moves\n" + "\n".join(str(m) for m in seq))
    return 0


def cmd_moves_explore(a, out: Out) -> int:
    g = _graph(a.file)
    if a.n_max < g.n_vertices:
        raise Rejected("--n-max must be at least the number of critical points")
    reps = mv.census(g, a.n_max)
    by_size: dict[int, int] = {}
    for r in reps.values():
        by_size[r.n_vertices] = by_size.get(r.n_vertices, 0) + 1
    payload = {"maps": len(reps), "by_critical_points": {str(k): v for k, v in sorted(by_size.items())}}
    out.emit(payload, lambda: f"{len(reps)} maps\n" + "\n".join(f"  {k} critical points: {v}" for k, v in sorted(by_size.items())))
    return 0


def cmd_persist_barcode(a, out: Out) -> int:
    b = ps.sublevel_barcode(_decorated(a.file))
    out.emit(b.to_dict(), _bars_text(b))
    return 0


def _tree_out(t: ReebGraph, out: Out) -> int:
    if out.dot:
        out.emit_dot(t.to_dot())
    else:
        out.emit(t.to_dict(), lambda: "\n".join(f"{x} ({t.heights[x]:g}) -- {y} ({t.heights[y]:g})" for x, y in t.edges))
    return 0


def cmd_persist_reeb(a, out: Out) -> int:
    return _tree_out(ps.reeb_graph(_decorated(a.file)), out)


def cmd_persist_merge_tree(a, out: Out) -> int:
    return _tree_out(ps.merge_tree(_decorated(a.file)), out)


def _verdict(out: Out, ok: bool, name: str) -> int:
    out.emit({"equivalent": ok}, f"{name}" if ok else f"not {name}")
    return 0


def cmd_equiv_graph(a, out: Out) -> int:
    return _verdict(out, ps.graph_equivalent(_decorated(a.first), _decorated(a.second), rank=a.rank), "graph-equivalent")


def cmd_equiv_homological(a, out: Out) -> int:
    return _verdict(out, ps.homologically_equivalent(_decorated(a.first), _decorated(a.second)),
                    "homologically equivalent")


def cmd_equiv_poset(a, out: Out) -> int:
    return _verdict(out, sl.poset_equivalent(_history(a.first), _history(a.second)), "poset-equivalent")


def cmd_slices_poset(a, out: Out) -> int:
    h = _history(a.file)
    try:
        p = sl.nesting_poset(h.forest_at(a.at))
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    if out.dot:
        out.emit_dot(p.to_dot())
        return 0
    payload = {"elements": list(p.elements), "covers": [list(e) for e in p.hasse_edges()]}
    out.emit(payload, lambda: f"{len(p)} elements\n" + "\n".join(f"  {x} < {'p0' if y == sl.OUTER else y}" for x, y in p.hasse_edges()))
    return 0


def cmd_slices_zigzag(a, out: Out) -> int:
    h = _history(a.file)
    try:
        z = sl.zigzag(h, a.slicing)
    except ValueError as exc:
        raise Rejected(str(exc)) from None
    rows = []
    for arr in z.arrows:
        rows.append({
            "event": arr.event, "side": arr.side, "t": h.events[arr.event].t, "kind": h.events[arr.event].kind,
            "from": arr.source, "to": arr.target, "injective": arr.injective, "surjective": arr.surjective,
            "iso": arr.iso, "map": dict(sorted(arr.mapping.items())),
        })

    def shape(r: dict[str, Any]) -> str:
        sym = "iso" if r["iso"] else "inj" if r["injective"] else "surj" if r["surjective"] else "map"
        return f"t={r['t']:g} {r['kind']:<8} {r['side']:<5} N{r['from']} -> N{r['to']} {sym}"

    payload = {"values": list(z.values), "sizes": [len(n) for n in z.nodes], "arrows": rows}
    if a.galois:
        view, caveat = z.galois_view()
        payload["galois"] = {"arrows": view, "caveat": caveat}
    out.emit(payload, lambda: "\n".join(shape(r) for r in rows))
    return 0


def cmd_slices_barcode(a, out: Out) -> int:
    b = sl.levelset_barcode(_history(a.file))
    out.emit(b.to_dict(), _bars_text(b))
    return 0


def cmd_count_lower_bound(a, out: Out) -> int:
    b = _barcode(a.file)
    ok, reason = rz.is_realizable(b)
    if not ok:
        raise Rejected(reason)
    n = rz.lower_bound(b)
    out.emit({"lower_bound": n}, str(n))
    return 0


def cmd_count_enumerate(a, out: Out) -> int:
    b = _barcode(a.file)
    try:
        hs = rz.enumerate_embeddings(b, strict_endpoints=a.strict_endpoints, max_bars=a.max_bars)
    except (rz.UnrealizableError, rz.EnumerationCapError) as exc:
        raise Rejected(str(exc)) from None
    bound = rz.lower_bound(b)
    payload = {"count": len(hs), "lower_bound": bound, "bound_respected": len(hs) >= bound,
               "histories": [h.to_dict() for h in hs]}
    out.emit(payload, f"{len(hs)} classes (lower bound {bound})")
    return 0


def cmd_realize_reeb(a, out: Out) -> int:
    try:
        r = rz.reeb_from_barcode(_barcode(a.file))
    except rz.UnrealizableError as exc:
        raise Rejected(str(exc)) from None
    return _tree_out(r, out)


def cmd_realize_history(a, out: Out) -> int:
    try:
        h = rz.history_from_reeb(rz.reeb_from_barcode(_barcode(a.file)))
    except rz.UnrealizableError as exc:
        raise Rejected(str(exc)) from None
    sys.stdout.write(json.dumps(h.to_dict(), indent=1, sort_keys=True) + "\n")
    return 0


def cmd_render(a, out: Out) -> int:
    data = _read_json(a.file)
    if isinstance(data, dict) and "rotations" in data:
        if a.tree == "reeb":
            out.emit_dot(ps.reeb_graph(_decorated(a.file)).to_dot())
        elif a.tree == "merge-tree":
            out.emit_dot(ps.merge_tree(_decorated(a.file)).to_dot())
        else:
            g = _graph(a.file)
            values = {str(x["id"]): x["value"] for x in data["vertices"] if "value" in x}
            out.emit_dot(to_dot(g, values or None))
    elif isinstance(data, dict) and "events" in data:
        h = _history(a.file)
        if a.at is None:
            raise Rejected("rendering a history needs --at")
        try:
            out.emit_dot(sl.nesting_poset(h.forest_at(a.at)).to_dot())
        except ValueError as exc:
            raise Rejected(str(exc)) from None
    elif isinstance(data, dict) and "bars" in data:
        try:
            out.emit_dot(rz.reeb_from_barcode(_barcode(a.file)).to_dot())
        except rz.UnrealizableError as exc:
            raise Rejected(str(exc)) from None
    else:
        raise Malformed(f"{a.file}: not a graph, history or barcode file")
    return 0


def cmd_generate_history(a, out: Out) -> int:
    h = sl.random_history(random.Random(a.seed), a.max_events)
    sys.stdout.write(json.dumps(h.to_dict(), indent=1, sort_keys=True) + "\n")
    return 0


def cmd_generate_barcode(a, out: Out) -> int:
    b = rz.random_realizable_barcode(random.Random(a.seed), a.bars)
    sys.stdout.write(json.dumps(b.to_dict(), indent=1, sort_keys=True) + "\n")
    return 0


def cmd_generate_values(a, out: Out) -> int:
    dg = ps.random_decoration(_graph(a.file), random.Random(a.seed))
    sys.stdout.write(json.dumps(dg.to_dict(), indent=1, sort_keys=True) + "\n")
    return 0


# ---- parser -------------------------------------------------------------------------------------

def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--json", action="store_true", help="machine-readable output", **d)
    p.add_argument("--quiet", action="store_true", help="suppress text output", **d)
    p.add_argument("--dot", action="store_true", help="emit DOT where applicable", **d)
    p.add_argument("--seed", type=int, help="seed for generators", **({"default": argparse.SUPPRESS} if suppress else {"default": 0}))


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors exit 2 like malformed input
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    root = _Parser(prog="msk", description="Morse functions on the sphere, combinatorially.")
    _global_flags(root, suppress=False)
    verbs = root.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)
    verbs.required = True

    def leaf(sub, name: str, fn, help: str):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    def group(name: str, help: str):
        p = verbs.add_parser(name, help=help)
        s = p.add_subparsers(dest="action", metavar="ACTION", parser_class=_Parser)
        s.required = True
        return s

    p = leaf(verbs, "validate", cmd_validate, "check Morse-Smale invariants of a graph file")
    p.add_argument("file")

    g = group("moves", "enumerate, apply and search fundamental moves")
    leaf(g, "enum", cmd_moves_enum, "list applicable move instances").add_argument("file")
    p = leaf(g, "apply", cmd_moves_apply, "apply one move")
    p.add_argument("file")
    p.add_argument("--move", required=True, help="move as JSON text or a file holding it")
    p = leaf(g, "connect", cmd_moves_connect, "find a move sequence between two graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--max-critical", type=int, default=None)
    p = leaf(g, "explore", cmd_moves_explore, "count maps reachable by additions")
    p.add_argument("file")
    p.add_argument("--n-max", type=int, required=True)

    g = group("persist", "sublevel persistence of decorated graphs")
    leaf(g, "barcode", cmd_persist_barcode, "sublevel barcode").add_argument("file")
    leaf(g, "reeb", cmd_persist_reeb, "Reeb graph").add_argument("file")
    leaf(g, "merge-tree", cmd_persist_merge_tree, "merge tree").add_argument("file")

    g = group("equiv", "equivalence checks")
    p = leaf(g, "graph", cmd_equiv_graph, "graph equivalence of decorated graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--rank", action="store_true", help="compare value ranks instead of values")
    for name, fn, help in (("homological", cmd_equiv_homological, "equal Betti profiles"),
                           ("poset", cmd_equiv_poset, "poset equivalence of histories")):
        p = leaf(g, name, fn, help)
        p.add_argument("first")
        p.add_argument("second")

    g = group("slices", "nesting posets of embedding histories")
    p = leaf(g, "poset", cmd_slices_poset, "nesting poset at a regular value")
    p.add_argument("file")
    p.add_argument("--at", type=float, required=True)
    p = leaf(g, "zigzag", cmd_slices_zigzag, "zigzag of posets")
    p.add_argument("file")
    p.add_argument("--slicing", type=float, nargs="+", default=None)
    p.add_argument("--galois", action="store_true", help="add the adjoint view of reversed arrows")
    leaf(g, "barcode", cmd_slices_barcode, "level-set barcode").add_argument("file")

    g = group("count", "counting embeddings that realize a barcode")
    leaf(g, "lower-bound", cmd_count_lower_bound, "conjectured lower bound").add_argument("file")
    p = leaf(g, "enumerate", cmd_count_enumerate, "enumerate classes")
    p.add_argument("file")
    p.add_argument("--strict-endpoints", action="store_true")
    p.add_argument("--max-bars", type=int, default=None)

    g = group("realize", "build Reeb graphs and histories from barcodes")
    leaf(g, "reeb", cmd_realize_reeb, "Reeb graph of a barcode").add_argument("file")
    leaf(g, "history", cmd_realize_history, "default history of a barcode").add_argument("file")

    p = leaf(verbs, "render", cmd_render, "DOT for a graph, a history slice or a barcode's Reeb graph")
    p.add_argument("file")
    p.add_argument("--at", type=float, default=None)
    p.add_argument("--tree", choices=("reeb", "merge-tree"), default=None,
                   help="for a decorated graph, draw its Reeb graph or merge tree instead")

    g = group("generate", "seeded random inputs")
    p = leaf(g, "history", cmd_generate_history, "random sphere history")
    p.add_argument("--max-events", type=int, default=12)
    p = leaf(g, "barcode", cmd_generate_barcode, "random realizable level-set barcode")
    p.add_argument("--bars", type=int, default=3)
    leaf(g, "values", cmd_generate_values, "random critical values for a graph").add_argument("file")
    return root


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Out(args)
    try:
        return args.fn(args, out)
    except Malformed as exc:
        sys.stderr.write(f"malformed input: {exc}\n")
        return 2
    except (Rejected, InvalidGraphError, mv.MoveError, rz.UnrealizableError, rz.EnumerationCapError,
            ps.DecorationError, sl.EventError) as exc:
        sys.stderr.write(f"rejected: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
