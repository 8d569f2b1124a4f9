from __future__ import annotations

import json
import subprocess
import sys

import pytest

from cmcsp import __version__
from cmcsp.algebra import minority_projection
from cmcsp.cli import EXIT_ACCEPT, EXIT_ERROR, EXIT_REJECT, main
from cmcsp.cmtree import with_projection_locals
from cmcsp.report import sha256_file
from cmcsp.signature import EQ2, SWAP01, Pair, identity_perm
from cmcsp.solver import Instance


def run(capsys, *argv) -> tuple[int, list[dict], str]:
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    lines = [json.loads(x) for x in cap.out.splitlines() if x.startswith("{")]
    return code, lines, cap.err


def write(tmp_path, name: str, data) -> str:
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


@pytest.fixture
def p3(tmp_path):
    return write(tmp_path, "p3.json", minority_projection(3).to_json())


@pytest.fixture
def sat_instance(tmp_path):
    inst = Instance(3, 1, ("x", "y"), {SWAP01: {("x", "y")}, Pair(EQ2, identity_perm(3)): {("x", "y")}})
    return write(tmp_path, "sat.json", inst.to_json())


@pytest.fixture
def unsat_instance(tmp_path):
    return write(tmp_path, "unsat.json", {"n": 2, "k": 0, "variables": ["x"],
                                          "constraints": [{"symbol": "empty", "tuples": [["x"]]}]})


# --- summary line and exit codes --------------------------------------------------------

def test_summary_line_carries_seed_versions_and_input_hashes(capsys, p3):
    code, lines, _ = run(capsys, "algebra", "check", p3, "--seed", 7)
    assert code == 0
    rec, summary = lines[0], lines[-1]["summary"]
    assert rec["kind"] == "algebra" and rec["size"] == 3 and rec["simple"]
    assert summary["command"] == "algebra check"
    assert summary["seed"] == 7
    assert summary["versions"]["cmcsp"] == __version__ and "numpy" in summary["versions"]
    assert summary["inputs"] == {p3: sha256_file(p3)}
    assert summary["records"] == 1


def test_solve_and_oracle_exit_codes(capsys, sat_instance, unsat_instance):
    code, lines, _ = run(capsys, "csp", "solve", sat_instance)
    assert code == EXIT_ACCEPT and lines[0]["verdict"] == "ACCEPT" and lines[0]["witness_ok"]
    assert run(capsys, "csp", "oracle", sat_instance)[0] == EXIT_ACCEPT
    assert run(capsys, "csp", "solve", unsat_instance)[0] == EXIT_REJECT
    assert run(capsys, "csp", "oracle", unsat_instance)[0] == EXIT_REJECT
    # the path-quantified reading rejects this satisfiable instance
    code, lines, _ = run(capsys, "csp", "solve", sat_instance, "--literal")
    assert code == EXIT_REJECT and lines[0]["literal"]


@pytest.mark.parametrize("argv", [
    ["csp", "solve", "/nonexistent.json"],
    ["algebra", "check", "--bogus"],
    ["pnk", "build", "--n", "1", "--k", "2"],
    ["csp", "gen", "--n", "2", "--k", "1", "--mode", "bogus"],
    [],
])
def test_errors_exit_two(capsys, argv):
    assert main(argv) == EXIT_ERROR


def test_malformed_inputs_exit_two(capsys, tmp_path):
    bad_json = write(tmp_path, "bad.json", "{not json")
    assert run(capsys, "algebra", "check", bad_json)[0] == EXIT_ERROR
    bad_prog = write(tmp_path, "bad.dl", "P(x) :- E(x)")
    code, _, err = run(capsys, "datalog", "check", bad_prog)
    assert code == EXIT_ERROR and "cmcsp: error" in err


# --- determinism and text output ------------------------------------------------------------

def test_gen_is_deterministic(capsys, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert run(capsys, "csp", "gen", "--n", 3, "--k", 2, "--seed", 11, "--out", path)[0] == 0
        outs.append(path.read_text())
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert data["generator"]["seed"] == 11
    Instance.from_json(data)
    run(capsys, "csp", "gen", "--n", 3, "--k", 2, "--seed", 12, "--out", tmp_path / "c.json")
    assert (tmp_path / "c.json").read_text() != outs[0]


def test_text_format(capsys, p3):
    code = main(["algebra", "congruences", p3, "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0
    assert "command: algebra congruences" in out and "seed: 0" in out
    assert not out.lstrip().startswith("{")


def test_out_file(capsys, tmp_path, p3):
    out = tmp_path / "report.ndjson"
    assert run(capsys, "algebra", "monolith", p3, "--out", out)[0] == 0
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert lines[0]["kind"] == "monolith" and "summary" in lines[-1]


# --- other commands ---------------------------------------------------------------------------

def test_tree_commands(capsys, tmp_path, p3):
    t = write(tmp_path, "t.json", with_projection_locals([(), (0,), (1,), (1, 0), (1, 1), (1, 2)]).to_json())
    code, lines, _ = run(capsys, "tree", "eval", t, "1.0", "1.1", "1.2")
    assert code == 0 and lines[0]["result"] == "1.1"
    code, lines, _ = run(capsys, "tree", "check", t)
    assert code == 0 and lines[0]["round_trip"]
    code, lines, _ = run(capsys, "tree", "represent", p3)
    assert code == 0 and len(lines[0]["leaf_of"]) == 3
    assert run(capsys, "tree", "eval", t, "0", "1", "1.0")[0] == EXIT_ERROR


def test_pnk_build_and_dump(capsys, tmp_path):
    dump = tmp_path / "rels.json"
    code, lines, _ = run(capsys, "pnk", "build", "--n", 3, "--k", 2, "--dump-relations", dump)
    assert code == 0 and lines[0]["leaves"] == 5 and lines[0]["conservative_minority"]
    assert lines[-1]["summary"]["dump"]["path"] == str(dump)
    assert json.loads(dump.read_text())["domain"]


def test_relbasis_commands(capsys, tmp_path):
    p2 = write(tmp_path, "p2.json", minority_projection(2).to_json())
    code, lines, _ = run(capsys, "relbasis", "catalog", p2)
    assert code == 0 and lines[-1]["summary"]["counts"]["unary"] == 4
    lin = write(tmp_path, "lin.json", {"tuples": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
                                       "sorts": [[0, 1]] * 3, "tuple": [0, 0, 0]})
    code, lines, _ = run(capsys, "relbasis", "check-critical", p2, lin)
    assert code == 0 and lines[0]["critical"] and lines[0]["multisorted_critical"]
    code, lines, _ = run(capsys, "relbasis", "survey", "--max-domain", 2)
    assert code == 0 and lines[-1]["summary"]["all_ok"]


def test_reduce_with_atlas(capsys, tmp_path):
    inst = tmp_path / "i.json"
    run(capsys, "csp", "gen", "--n", 2, "--k", 2, "--seed", 3, "--out", inst)
    atlas = tmp_path / "atlas.json"
    code, lines, _ = run(capsys, "csp", "reduce", inst, "--dump-atlas", atlas)
    assert code == 0 and lines[0]["to_level"] == 1
    assert set(json.loads(atlas.read_text())) <= set(json.loads(inst.read_text())["variables"])


def test_datalog_commands(capsys, tmp_path, sat_instance, unsat_instance):
    prog = tmp_path / "solve3.dl"
    assert run(capsys, "datalog", "gen-solve-n1", "--n", 3, "--out", prog)[0] == 0
    code, lines, _ = run(capsys, "datalog", "check", prog)
    assert code == 0 and lines[0]["linear"] and lines[0]["symmetric"]
    code, lines, _ = run(capsys, "datalog", "run", prog, "--db", sat_instance)
    assert code == 0 and lines[-1]["summary"]["goal_derived"] is False
    lin = tmp_path / "lin.dl"
    run(capsys, "datalog", "gen-lin", "--out", lin)
    assert run(capsys, "datalog", "run", prog, lin, "--db", sat_instance)[0] == EXIT_ERROR


def test_staged_run(capsys, tmp_path):
    s1 = write(tmp_path, "s1.dl", "P(x,y) :- E(x,y). P(x,z) :- P(x,y), E(y,z). output P.")
    s2 = write(tmp_path, "s2.dl", "Cyc(x) :- P(x,x). goal Cyc. output Cyc.")
    db = write(tmp_path, "db.json", {"domain": ["a", "b"], "relations": {"E": [["a", "b"], ["b", "a"]]}})
    code, lines, _ = run(capsys, "datalog", "run", s1, s2, "--db", db, "--stages", "--show-tuples")
    assert code == 0
    assert lines[0]["predicate"] == "Cyc" and lines[0]["tuples"] == [["a"], ["b"]]
    assert lines[-1]["summary"]["goal_derived"]


# --- batch commands with figures --------------------------------------------------------------

def test_bench_writes_records_fit_and_figure(capsys, tmp_path):
    out = tmp_path / "bench.ndjson"
    code = main(["bench", "--n", "2", "--k", "1,2", "--sizes", "20,40", "--reps", "2", "--out", str(out)])
    assert code == 0
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    summary = lines[-1]["summary"]
    assert len(lines) - 1 == 2 * 2 * 2
    assert summary["fit"]["points"] == 8 and len(summary["growth"]) == 2
    fig = tmp_path / "bench.png"
    assert summary["figure"] == str(fig)
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_crosscheck_writes_figure_and_is_deterministic(capsys, tmp_path):
    texts = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.ndjson"
        fig = tmp_path / f"{name}.png"
        code = main(["crosscheck", "--n", "2,3", "--k", "1", "--seeds", "0:8", "--max-vars", "6",
                     "--out", str(out), "--figure", str(fig)])
        assert code == 0
        assert fig.read_bytes()[:4] == b"\x89PNG"
        lines = [json.loads(x) for x in out.read_text().splitlines()]
        assert lines[-1]["summary"]["disagreements"] == 0
        texts.append(lines[:-1])
    assert texts[0] == texts[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmcsp", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
