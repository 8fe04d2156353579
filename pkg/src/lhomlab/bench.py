"""Solver dispatch and the benchmark harness.

A bench suite names a corpus spec (or a list of instance files), the
algorithms to run and a reference algorithm.  Every solve is recorded as a
row; rows are compared against the reference to build an agreement table.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InvalidInput, LabError, PreconditionError
from .graph import longest_induced_path_at_least
from .instance import Instance, check_homomorphism, instance_from_dict
from .oracle import SolveResult, solve_brute

ALGOS = ("oracle", "branching", "winwin", "dp")


@dataclass
class SolveOptions:
    t: int | None = None
    claw: tuple = (2, 2, 2)
    strategy: str = "min-fill"
    budget: object = "default"
    check: bool = True
    max_nodes: int | None = 10**6


def infer_t(g) -> int:
    """Smallest t such that g is P_t-free."""
    t = 1
    while longest_induced_path_at_least(g, t) is not None:
        t += 1
    return t


def solve_with(algo: str, inst: Instance, opts: SolveOptions | None = None) -> SolveResult:
    opts = opts or SolveOptions()
    if algo == "oracle":
        return solve_brute(inst, budget=opts.budget)
    if algo == "branching":
        from .branching import BranchConfig, solve_ptfree

        t = opts.t or infer_t(inst.graph)
        cfg = BranchConfig(check_ptfree=opts.check, max_nodes=opts.max_nodes)
        return solve_ptfree(inst, t, cfg)
    if algo == "winwin":
        from .winwin import WinWinConfig, solve_sabc

        dp_budget = None if opts.budget == "default" else opts.budget
        cfg = WinWinConfig(claw=tuple(opts.claw), check_free=opts.check, max_nodes=opts.max_nodes,
                           dp_budget=dp_budget if dp_budget is not None else 10**7)
        return solve_sabc(inst, cfg)
    if algo == "dp":
        from .treewidth import build_decomposition, solve_dp

        t = opts.t or max(2, max(opts.claw))
        td = build_decomposition(inst.graph, opts.strategy, t=t)
        return solve_dp(inst, td, budget=opts.budget)
    raise InvalidInput(f"unknown algorithm {algo!r}; expected one of {ALGOS}")


def timed_solve(algo: str, inst: Instance, opts: SolveOptions | None = None) -> dict:
    """Run one solver and classify the outcome; yes answers are re-validated."""
    t0 = time.perf_counter()
    row = {"algo": algo}
    try:
        res = solve_with(algo, inst, opts)
        if res.answer:
            chk = check_homomorphism(inst, res.witness)
            row["status"] = "yes" if chk else "invalid-witness"
        else:
            row["status"] = "no"
        row["stats"] = res.stats
    except BudgetExceeded as exc:
        row["status"] = "budget"
        row["error"] = str(exc)
    except PreconditionError as exc:
        row["status"] = "precondition"
        row["error"] = str(exc)
    except LabError as exc:
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["seconds"] = time.perf_counter() - t0
    return row


def _solve_all(task):
    name, inst_dict, algos, opts_dict, time_limit = task
    inst = instance_from_dict(inst_dict)
    opts = SolveOptions(**opts_dict)
    rows = []
    for algo in algos:
        row = timed_solve(algo, inst, opts)
        if time_limit is not None and row["seconds"] > time_limit and row["status"] in ("yes", "no"):
            row["late_status"] = row["status"]
            row["status"] = "timeout"
        row.update(instance=name, n=inst.n, m=inst.graph.num_edges, k=inst.target.n)
        rows.append(row)
    return rows


@dataclass
class BenchReport:
    rows: list
    agreement: dict
    files: list = field(default_factory=list)

    @property
    def disagreements(self) -> int:
        return sum(a["disagree"] for a in self.agreement.values())

    def to_dict(self) -> dict:
        return {"agreement": self.agreement, "disagreements": self.disagreements, "files": self.files,
                "rows": len(self.rows)}


def agreement_table(rows: list, reference: str) -> dict:
    by_inst = {}
    for r in rows:
        by_inst.setdefault(r["instance"], {})[r["algo"]] = r
    algos = sorted({r["algo"] for r in rows} - {reference})
    table = {}
    for algo in algos:
        agg = {"agree": 0, "disagree": 0, "unanswered": 0, "reference_unanswered": 0, "answered_where_reference_failed": 0}
        for res in by_inst.values():
            mine, ref = res.get(algo), res.get(reference)
            if mine is None or ref is None:
                continue
            ok_mine = mine["status"] in ("yes", "no")
            ok_ref = ref["status"] in ("yes", "no")
            if not ok_ref:
                agg["reference_unanswered"] += 1
                if ok_mine:
                    agg["answered_where_reference_failed"] += 1
            elif not ok_mine:
                agg["unanswered"] += 1
            elif mine["status"] == ref["status"]:
                agg["agree"] += 1
            else:
                agg["disagree"] += 1
            if mine["status"] == "invalid-witness":
                agg["disagree"] += 1
        table[algo] = agg
    return table


def _load_instances(suite: dict, base_dir: str) -> list:
    if "corpus" in suite:
        from .corpus import generate_corpus

        return [(it.name, it.instance.to_dict()) for it in generate_corpus(suite["corpus"])]
    out = []
    for path in suite.get("instances", []):
        full = os.path.join(base_dir, path)
        with open(full) as fh:
            out.append((os.path.splitext(os.path.basename(path))[0], json.load(fh)))
    if not out:
        raise InvalidInput("bench suite needs 'corpus' or a non-empty 'instances' list")
    return out


def run_bench(suite: dict, out_dir: str | None = None, base_dir: str = ".", plots: bool = True) -> BenchReport:
    """Run every algorithm of the suite on every instance; write CSV and figures to ``out_dir``."""
    algos = suite.get("algos", ["oracle", "winwin"])
    for a in algos:
        if a not in ALGOS:
            raise InvalidInput(f"unknown algorithm {a!r}")
    reference = suite.get("reference", algos[0])
    opts = dict(suite.get("options", {}))
    if "claw" in opts:
        opts["claw"] = tuple(opts["claw"])
    SolveOptions(**opts)
    time_limit = suite.get("time_limit")
    tasks = [(name, d, algos, opts, time_limit) for name, d in _load_instances(suite, base_dir)]
    workers = int(suite.get("workers", 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_solve_all, tasks))
    else:
        chunks = [_solve_all(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    report = BenchReport(rows, agreement_table(rows, reference))
    if out_dir is not None:
        from .report import render_bench

        report.files = render_bench(rows, report.agreement, out_dir, suite.get("name", "bench"), plots=plots)
    return report
