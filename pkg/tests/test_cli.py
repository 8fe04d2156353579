import io
import json
import subprocess
import sys

import pytest

from lhomlab.cli import dispatch
from lhomlab.graph import complete_graph, cycle_graph, path_graph
from lhomlab.instance import full_lists
from lhomlab.target import TargetGraph


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, _ = dispatch(list(argv), out, err)
    return code, json.loads(out.getvalue()), err.getvalue()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_analyze_builtin():
    code, rep, err = run("analyze", "refl-cycle:4")
    assert code == 0 and rep["result"]["flags"]["predator_present"]["value"]
    assert "exit 0" in err


@pytest.mark.parametrize("algo,expect", [("oracle", 0), ("dp", 0), ("branching", 0)])
def test_solve_yes(tmp_path, algo, expect):
    inst = full_lists(TargetGraph(complete_graph(3)), cycle_graph(5))
    f = write(tmp_path, "i.json", inst.to_dict())
    code, rep, _ = run("solve", f, "--algo", algo)
    assert code == expect and rep["verification"]["witness"] == "valid"


def test_solve_no_and_budget(tmp_path):
    inst = full_lists(TargetGraph(complete_graph(2)), cycle_graph(5))
    f = write(tmp_path, "i.json", inst.to_dict())
    assert run("solve", f)[0] == 1
    big = full_lists(TargetGraph(complete_graph(3)), path_graph(14))
    f = write(tmp_path, "big.json", big.to_dict())
    code, rep, _ = run("solve", f, "--budget", "100")
    assert code == 3 and rep["budgets_hit"]


def test_usage_errors(tmp_path):
    assert run()[0] == 2
    assert run("solve")[0] == 2
    assert run("solve", str(tmp_path / "missing.json"))[0] == 2
    bad = write(tmp_path, "bad.json", "{not json")
    assert run("solve", bad)[0] == 2
    inval = write(tmp_path, "inval.json", {"target": {"n": 2, "edges": [[0, 1]]},
                                           "graph": {"n": 1, "edges": []}, "lists": [[7]]})
    assert run("solve", inval)[0] == 2
    assert run("analyze", "nosuch:3")[0] == 2


def test_precondition_exit(tmp_path):
    inst = full_lists(TargetGraph(complete_graph(2)), path_graph(6))
    f = write(tmp_path, "i.json", inst.to_dict())
    code, rep, _ = run("solve", f, "--algo", "branching", "--t", "4")
    assert code == 2 and rep["result"]["type"] == "PreconditionError"


def test_reduce_sat_pt(tmp_path):
    cnf = write(tmp_path, "phi.cnf", "p cnf 1 2\n1 0\n-1 0\n")
    out = str(tmp_path / "art.json")
    code, rep, _ = run("reduce", "sat-pt", cnf, "--target", "ht:3", "--verify", "--out", out)
    assert code == 0 and rep["verification"]["equisatisfiable"]
    art = json.loads(open(out).read())
    assert art["notes"]["t"] == rep["result"]["freeness"]["t"]


def test_reduce_needs_target(tmp_path):
    cnf = write(tmp_path, "phi.cnf", "p cnf 1 1\n1 0\n")
    assert run("reduce", "sat-pt", cnf)[0] == 2


def test_reduce_col3(tmp_path):
    g = write(tmp_path, "g.json", cycle_graph(5).to_dict())
    code, rep, _ = run("reduce", "col3-sabc", g, "--target", "refl-cycle:4", "--verify")
    assert code == 0 and rep["verification"]["equisatisfiable"]


def test_gadget_synth_and_verify_round_trip(tmp_path):
    out = str(tmp_path / "gd.json")
    code, rep, _ = run("gadget", "synth", "--target", "complete:3", "--kind", "neq", "--colours", "0,1,2", "--out", out)
    assert code == 0 and rep["result"]["gadget"]["instance"]["graph"]["n"] == 2
    code, rep, _ = run("gadget", "verify", out)
    assert code == 0 and rep["result"]["ok"]
    d = json.loads(open(out).read())
    d["relation"].append([0, 0])
    bad = write(tmp_path, "bad.json", d)
    assert run("gadget", "verify", bad)[0] == 1


def test_sep_find_and_verify(tmp_path):
    g = write(tmp_path, "g.json", cycle_graph(20).to_dict())
    code, rep, _ = run("sep", "find", g, "--t", "2")
    assert code == 0 and rep["verification"]["recheck"]
    core = ",".join(map(str, rep["result"]["certificate"]["core"]))
    assert run("sep", "verify", g, "--X", core)[0] == 0
    assert run("sep", "verify", g, "--X", "0")[0] == 1


def test_free_check(tmp_path):
    g = write(tmp_path, "g.json", cycle_graph(6).to_dict())
    assert run("free-check", g, "--family", "P6")[0] == 0
    code, rep, _ = run("free-check", g, "--family", "P5", "--family", "K3")
    assert code == 1 and not rep["result"]["free"]


def test_corpus_and_bench(tmp_path):
    spec = write(tmp_path, "spec.json", {"family": "sabc", "count": 4, "seed": 1, "n_max": 8, "k_max": 4})
    code, rep, _ = run("corpus", spec, "--out-dir", str(tmp_path / "c"))
    assert code == 0 and rep["result"]["count"] == 4
    suite = write(tmp_path, "suite.json", {"instances": [f"c/{n}.json" for n in rep["result"]["names"]],
                                           "algos": ["oracle", "dp", "winwin"], "name": "s"})
    code, rep, _ = run("bench", suite, "--out-dir", str(tmp_path / "b"), "--no-plots")
    assert code == 0 and rep["result"]["disagreements"] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lhomlab", "analyze", "cycle:6"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["subcommand"] == "analyze"
