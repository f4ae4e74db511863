import json

import jsonschema
import pytest

from congestlab.cli import SCHEMA_PATH, format_record, main
from congestlab.graphio import read_graph, write_graph
from congestlab.graphs import Graph, complete_graph, cycle_graph, path_graph

SCHEMA = json.loads(SCHEMA_PATH.read_text())


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, g in {"p3": path_graph(3), "k3": complete_graph(3), "k8": complete_graph(8),
                    "c5": cycle_graph(5), "edge": path_graph(2),
                    "star": Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])}.items():
        paths[name] = str(tmp_path / f"{name}.g")
        write_graph(paths[name], g)
    paths["dir"] = tmp_path
    return paths


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def record(capsys, *argv):
    code, out, err = invoke(capsys, *argv, "--format", "json")
    assert code == 0, err
    rec = json.loads(out)
    jsonschema.validate(rec, SCHEMA)
    return rec


def test_gen_even_cycle(capsys, files):
    out = str(files["dir"] / "ec.g")
    rec = record(capsys, "gen", "even-cycle", "--N", "3", "--k", "3", "--random", "--out", out)
    assert rec["n"] == 18 and rec["cut"] == 6
    g, records = read_graph(out)
    assert g.node_count == 18
    assert any(r.startswith("family even-cycle") for r in records)


def test_gen_to_stdout_sends_record_to_stderr(capsys):
    code, out, err = invoke(capsys, "gen", "hk", "--k", "2", "--format", "json")
    assert code == 0
    assert json.loads(err)["n"] == 20
    assert out.strip()


def test_gen_hk_bad_k(capsys):
    code, _, err = invoke(capsys, "gen", "hk", "--k", "0")
    assert code == 2 and "k" in err


def test_gen_missing_inputs(capsys):
    assert invoke(capsys, "gen", "even-cycle", "--N", "2")[0] == 2


def test_run_induced_p2(capsys, files):
    rec = record(capsys, "run", "induced-p2", "--graph", files["p3"], "--model", "broadcast")
    assert rec["verdict"] is True and rec["rounds"] == 3
    rec = record(capsys, "--model", "broadcast", "run", "induced-p2", "--graph", files["k3"])
    assert rec["verdict"] is False


def test_run_mcis(capsys, files):
    rec = record(capsys, "run", "mcis", "--graph", files["k3"], "--h", files["k3"], "--tau", "2")
    assert rec["size"] == 3 and len(rec["mapping"]) == 3


def test_run_tree_detect_on_edge(capsys, files):
    rec = record(capsys, "run", "tree-detect", "--graph", files["p3"], "--tree", files["edge"],
                 "--d", "1", "--seed", "7")
    assert rec["verdict"] is True


def test_run_other_algorithms(capsys, files):
    rec = record(capsys, "run", "vc", "--graph", files["star"], "--tau", "1")
    assert rec["cover"] == [0]
    rec = record(capsys, "run", "orientation", "--graph", files["c5"], "--d", "2")
    assert rec["max_out_degree"] <= 2 * 2 and rec["acyclic"]
    rec = record(capsys, "run", "clique-cc", "--graph", files["k3"], "--h", files["k3"], "--s", "3")
    assert rec["verdict"] is True
    rec = record(capsys, "run", "induced-mcis", "--graph", files["p3"], "--h", files["p3"], "--tau", "1")
    assert rec["verdict"] is True


def test_exit_codes(capsys, files):
    assert invoke(capsys, "run", "mcis", "--graph", files["k3"], "--h", files["k3"], "--tau", "2",
                  "--bandwidth", "2")[0] == 3
    assert invoke(capsys, "run", "orientation", "--graph", files["k8"], "--d", "1")[0] == 4
    assert invoke(capsys, "run", "vc", "--graph", files["k8"], "--tau", "1")[0] == 2
    assert invoke(capsys, "run", "clique-cc", "--graph", files["k3"], "--h", files["k3"], "--s", "3",
                  "--model", "congest")[0] == 2
    assert invoke(capsys, "run", "induced-p2", "--graph", str(files["dir"] / "missing.g"))[0] == 2
    assert invoke(capsys, "bogus")[0] == 2


def test_verify_family_and_reduction(capsys):
    rec = record(capsys, "verify", "--family", "even-cycle", "--N", "2", "--exhaustive")
    assert rec["passed"] and rec["checked"] == 256
    rec = record(capsys, "verify", "--reduction", "clique-to-pattern", "--samples", "20")
    assert rec["passed"]
    rec = record(capsys, "verify", "--algorithm", "induced-p2", "--samples", "20")
    assert rec["passed"]


def test_verify_corrupted_instance(capsys, files):
    path = str(files["dir"] / "inst.g")
    assert invoke(capsys, "gen", "even-cycle", "--N", "2", "--x0", "1", "--x1", "1", "--out", path)[0] == 0
    assert record(capsys, "verify", "--instance", path)["passed"]
    lines = open(path).read().splitlines()
    idx = next(i for i, line in enumerate(lines) if line.startswith("# side "))
    vals = lines[idx].split()
    vals[2] = "1" if vals[2] == "0" else "0"
    lines[idx] = " ".join(vals)
    open(path, "w").write("\n".join(lines) + "\n")
    code, out, _ = invoke(capsys, "verify", "--instance", path, "--format", "json")
    assert code == 1
    rec = json.loads(out)
    jsonschema.validate(rec, SCHEMA)
    assert not rec["passed"]


def test_reduce_commands(capsys, files):
    out = str(files["dir"] / "red.g")
    rec = record(capsys, "reduce", "clique-to-pattern", "--graph", files["c5"], "--pattern", files["k3"],
                 "--s", "3", "--out", out)
    assert rec["n"] == 15
    rec = record(capsys, "reduce", "blowup", "--graph", files["edge"], "--k", "2", "--out", out)
    assert rec["n"] == 4
    rec = record(capsys, "reduce", "strip", "--graph", files["k3"], "--coloring", "1,1,1", "--out", out)
    assert rec["m"] == 0
    rec = record(capsys, "reduce", "complement", "--graph", files["c5"], "--pattern", files["p3"], "--out", out)
    assert rec["m"] == 5


def test_bench_rows(capsys):
    rec = record(capsys, "bench", "induced-p2", "--sizes", "6,8", "--samples", "2")
    assert len(rec["rows"]) == 4
    rec = record(capsys, "bench", "families", "--sizes", "2")
    assert len(rec["rows"]) == 6


def test_reruns_are_byte_identical(capsys, files):
    argv = ["bench", "tree-detect", "--sizes", "6", "--samples", "2", "--seed", "3", "--format", "csv"]
    first = invoke(capsys, *argv)
    assert first[0] == 0
    assert invoke(capsys, *argv) == first
    argv = ["gen", "treewidth2", "--N", "2", "--random", "--seed", "5"]
    assert invoke(capsys, *argv) == invoke(capsys, *argv)


def test_formats():
    rec = {"command": "bench", "rows": [{"a": 1, "b": True}, {"a": 2, "b": None}]}
    assert format_record(rec, "csv") == "a,b\n1,yes\n2,\n"
    table = format_record(rec, "table")
    assert table.splitlines()[0].split() == ["a", "b"]
