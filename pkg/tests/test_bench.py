import csv

import pytest

from lhomlab.bench import SolveOptions, agreement_table, infer_t, run_bench, solve_with, timed_solve
from lhomlab.errors import InvalidInput
from lhomlab.graph import complete_graph, cycle_graph, path_graph
from lhomlab.instance import full_lists
from lhomlab.target import TargetGraph


def test_infer_t():
    assert infer_t(path_graph(4)) == 5
    assert infer_t(complete_graph(4)) == 3


def test_solve_with_each_algo():
    h = TargetGraph(cycle_graph(6))
    inst = full_lists(h, path_graph(4))
    for algo in ("oracle", "branching", "winwin", "dp"):
        assert solve_with(algo, inst).answer
    with pytest.raises(InvalidInput):
        solve_with("magic", inst)


def test_timed_solve_statuses():
    h = TargetGraph(complete_graph(3))
    row = timed_solve("oracle", full_lists(h, complete_graph(4)))
    assert row["status"] == "no"
    row = timed_solve("oracle", full_lists(h, path_graph(12)), SolveOptions(budget=10))
    assert row["status"] == "budget"
    row = timed_solve("winwin", full_lists(h, complete_graph(3)))
    assert row["status"] in ("precondition", "no")


def test_agreement_table():
    rows = [
        {"instance": "a", "algo": "oracle", "status": "yes"},
        {"instance": "a", "algo": "x", "status": "no"},
        {"instance": "b", "algo": "oracle", "status": "budget"},
        {"instance": "b", "algo": "x", "status": "yes"},
        {"instance": "c", "algo": "oracle", "status": "no"},
        {"instance": "c", "algo": "x", "status": "no"},
    ]
    agg = agreement_table(rows, "oracle")["x"]
    assert agg["agree"] == 1 and agg["disagree"] == 1
    assert agg["reference_unanswered"] == 1 and agg["answered_where_reference_failed"] == 1


def test_run_bench_writes_outputs(tmp_path):
    suite = {"corpus": {"family": "sabc", "count": 6, "seed": 3, "n_max": 8, "k_max": 4},
             "algos": ["oracle", "winwin", "dp"], "name": "smoke"}
    rep = run_bench(suite, str(tmp_path))
    assert rep.disagreements == 0 and len(rep.rows) == 18
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["smoke.csv", "smoke_agreement.csv", "smoke_runtime.png", "smoke_status.png"]
    with open(tmp_path / "smoke.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 18


def test_run_bench_rejects_unknown_algo():
    with pytest.raises(InvalidInput):
        run_bench({"corpus": {"family": "sabc", "count": 1}, "algos": ["magic"]})
