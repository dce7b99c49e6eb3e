from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import DATA
from msk.cli import main
from msk.slices import EmbeddingHistory


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def f(name: str) -> str:
    return str(DATA / name)


def test_validate(capsys):
    assert run(capsys, "validate", f("fig2.graph.json")) == (0, "valid\n", "")


def test_validate_reports_violations(tmp_path, capsys):
    data = json.loads((DATA / "fig2.graph.json").read_text())
    r = data["rotations"]["ab"]
    r[0], r[1] = r[1], r[0]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and out.startswith("invalid") and "alternate" in out


def test_lower_bound(capsys):
    assert run(capsys, "count", "lower-bound", f("nested3.barcode.json"))[:2] == (0, "8\n")


def test_graph_equivalence_verdict(capsys):
    code, out, _ = run(capsys, "equiv", "graph", f("fig3_left.graph.json"), f("fig3_right.graph.json"))
    assert (code, out) == (0, "not graph-equivalent\n")
    code, out, _ = run(capsys, "--json", "equiv", "graph", f("fig3_left.graph.json"), f("fig3_left.graph.json"))
    assert json.loads(out) == {"equivalent": True}


def test_unknown_verb(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "usage" in err


def test_malformed_input(tmp_path, capsys):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2 and "malformed" in err
    p.write_text(json.dumps({"bars": [{"birth": {"v": 0, "t": "half"}, "death": "inf"}]}))
    assert run(capsys, "count", "lower-bound", str(p))[0] == 2


def test_domain_rejection_reason_verbatim(capsys):
    code, out, err = run(capsys, "count", "lower-bound", f("forbidden.barcode.json"))
    assert code == 1 and out == ""
    assert "open bar forbidden in sublevel flavor" in err


def test_persistence_verbs(capsys):
    code, out, _ = run(capsys, "persist", "barcode", f("fig3_left.graph.json"))
    assert out == "sublevel: H0: [1,inf) [2,3); H1: [4,6) [5,7); H2: [8,inf)\n"
    code, out, _ = run(capsys, "--json", "persist", "merge-tree", f("fig3_left.graph.json"))
    assert json.loads(out)["kind"] == "merge_tree"


def test_dot_rendering(capsys):
    for argv in (("render", f("fig2.graph.json")),
                 ("render", "--tree", "reeb", f("fig3_left.graph.json")),
                 ("render", "--tree", "merge-tree", f("fig3_left.graph.json")),
                 ("render", "--at", "2.5", f("shotglass.history.json")),
                 ("render", f("staircase.barcode.json")),
                 ("slices", "poset", "--dot", "--at", "2.5", f("worm.history.json"))):
        code, out, _ = run(capsys, *argv)
        assert code == 0 and out.split()[0] in ("graph", "digraph") and out.rstrip().endswith("}")


def test_render_history_needs_value(capsys):
    assert run(capsys, "render", f("worm.history.json"))[0] == 1


def test_slices_verbs(capsys):
    code, out, _ = run(capsys, "slices", "barcode", f("shotglass.history.json"))
    assert out == "levelset: H0: [1,4] [2,3)\n"
    code, out, _ = run(capsys, "--json", "slices", "zigzag", "--galois", f("shotglass.history.json"))
    payload = json.loads(out)
    assert payload["sizes"] == [1, 1, 2, 2, 3, 3, 2, 1, 1]
    assert "splitting saddles" in payload["galois"]["caveat"]
    code, out, _ = run(capsys, "slices", "poset", "--at", "4", f("worm.history.json"))
    assert code == 1


def test_moves_verbs(capsys):
    code, out, _ = run(capsys, "--json", "moves", "enum", f("fig2.graph.json"))
    first = json.loads(out)[0]
    code, out, _ = run(capsys, "moves", "apply", f("fig2.graph.json"), "--move", json.dumps(first))
    assert code == 0 and len(json.loads(out)["vertices"]) == 10
    code, out, _ = run(capsys, "moves", "connect", f("fig3_left.graph.json"), f("fig3_right.graph.json"),
                       "--max-depth", "12")
    assert code == 0 and out.startswith("2 moves")
    code, out, _ = run(capsys, "moves", "connect", f("fig3_left.graph.json"), f("fig3_right.graph.json"),
                       "--max-depth", "1")
    assert code == 1
    code, out, _ = run(capsys, "--json", "moves", "explore", f("fig2.graph.json"), "--n-max", "10")
    assert json.loads(out)["maps"] == 17
    bad = json.dumps({"kind": "CancelFaceMax", "site": {"saddle": "ab", "extremum": "b"}})
    code, _, err = run(capsys, "moves", "apply", f("fig2.graph.json"), "--move", bad)
    assert code == 1 and "CancelFaceMax" in err


def test_enumerate_and_cap(capsys, monkeypatch):
    code, out, _ = run(capsys, "count", "enumerate", f("nested3.barcode.json"))
    assert out == "8 classes (lower bound 8)\n"
    code, out, _ = run(capsys, "--json", "count", "enumerate", "--strict-endpoints", f("nested2.barcode.json"))
    assert json.loads(out)["count"] >= 1
    assert run(capsys, "count", "enumerate", "--max-bars", "2", f("nested3.barcode.json"))[0] == 1
    monkeypatch.setenv("MSK_MAX_BARS", "2")
    code, _, err = run(capsys, "count", "enumerate", f("nested3.barcode.json"))
    assert code == 1 and "cap" in err


def test_realize_history_parses(capsys):
    code, out, _ = run(capsys, "realize", "history", f("staircase.barcode.json"))
    h = EmbeddingHistory.from_dict(json.loads(out))
    assert len(h.events) == 6


def test_equiv_poset_and_homological(capsys):
    assert run(capsys, "equiv", "poset", f("worm.history.json"), f("shotglass.history.json"))[1] == "not poset-equivalent\n"
    assert run(capsys, "equiv", "homological", f("fig3_left.graph.json"),
               f("fig3_right.graph.json"))[1] == "homologically equivalent\n"


def test_quiet_suppresses_text(capsys):
    assert run(capsys, "--quiet", "validate", f("fig2.graph.json")) == (0, "", "")


@pytest.mark.parametrize("argv", [
    ("generate", "history", "--seed", "4"),
    ("generate", "barcode", "--bars", "4", "--seed", "4"),
    ("generate", "values", "--seed", "4", "{fig2}"),
    ("--json", "count", "enumerate", "{nested3}"),
])
def test_deterministic_output(capsys, argv):
    argv = [a.format(fig2=f("fig2.graph.json"), nested3=f("nested3.barcode.json")) for a in argv]
    first = run(capsys, *argv)
    assert first[0] == 0
    assert run(capsys, *argv) == first


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "msk.cli", "validate", f("fig2.graph.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "valid\n"
