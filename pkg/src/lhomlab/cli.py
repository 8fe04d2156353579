"""Command-line front end.

Reports go to standard output as JSON and a one-line summary goes to
standard error.  Exit status: 0 answered yes (or success), 1 answered no
(or a check failed), 2 usage or validation error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded, GadgetNotFound, InvalidInput, LabError, PreconditionError
from .graph import Graph, complete_graph, cycle_graph, graph_from_dict
from .instance import check_homomorphism, instance_from_dict
from .target import TargetGraph, as_target, build_ht, target_from_dict

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunReport:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    timing: float = 0.0
    budgets_hit: list = field(default_factory=list)
    verification: dict = field(default_factory=dict)
    exit_code: int = EXIT_YES

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "result": self.result,
            "timing": round(self.timing, 6),
            "budgets_hit": self.budgets_hit,
            "verification": self.verification,
            "exit_code": self.exit_code,
        }


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str, report: RunReport) -> str:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    report.inputs[path] = hashlib.sha256(text.encode()).hexdigest()
    return text


def _read_json(path: str, report: RunReport):
    try:
        return json.loads(_read(path, report))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON: {exc}") from exc


def _ints(text: str | None) -> list:
    if text is None:
        return []
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from exc


def load_target(arg: str, report: RunReport) -> TargetGraph:
    """A JSON graph file, or one of ht:T, cycle:K, refl-cycle:K, complete:K, refl-complete:K."""
    if ":" in arg and not arg.endswith(".json"):
        name, _, val = arg.partition(":")
        try:
            k = int(val)
        except ValueError as exc:
            raise InvalidInput(f"bad target {arg!r}") from exc
        builders = {
            "ht": build_ht,
            "cycle": lambda k: cycle_graph(k),
            "refl-cycle": lambda k: cycle_graph(k, reflexive=True),
            "complete": lambda k: complete_graph(k),
            "refl-complete": lambda k: complete_graph(k, reflexive=True),
        }
        if name not in builders:
            raise InvalidInput(f"unknown target family {name!r}")
        report.inputs[arg] = "builtin"
        return as_target(builders[name](k))
    return target_from_dict(_read_json(arg, report))


def _graph(path: str, report: RunReport) -> Graph:
    return graph_from_dict(_read_json(path, report))


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args, rep: RunReport):
    from .target import classify_target

    h = load_target(args.target, rep)
    rep.result = classify_target(h).to_dict()
    return EXIT_YES, f"analyzed target with {h.n} vertices"


def cmd_solve(args, rep: RunReport):
    from .bench import SolveOptions, solve_with

    inst = instance_from_dict(_read_json(args.instance, rep))
    budget = "default" if args.budget is None else (None if args.budget == "none" else float(args.budget))
    opts = SolveOptions(t=args.t, claw=tuple(_ints(args.claw)) or (2, 2, 2), strategy=args.strategy,
                        budget=budget, check=not args.no_check)
    res = solve_with(args.algo, inst, opts)
    rep.result = res.to_dict()
    if res.answer:
        chk = check_homomorphism(inst, res.witness)
        rep.verification["witness"] = "valid" if chk else f"invalid: {chk.message}"
        if not chk:
            raise LabError(f"solver returned an invalid witness: {chk.message}")
        return EXIT_YES, f"{args.algo}: yes"
    return EXIT_NO, f"{args.algo}: no"


def _source_answer(kind, src):
    from .reductions import is_three_colourable

    if kind in ("sat-pt", "sat-line"):
        return src.satisfiable()
    if kind == "col3-sabc":
        return is_three_colourable(src)
    from .oracle import solve_brute

    return solve_brute(src, budget=None).answer


def cmd_reduce(args, rep: RunReport):
    from . import reductions as red

    kind = args.kind
    if kind in ("sat-pt", "sat-line"):
        src = red.parse_dimacs_cnf(_read(args.input, rep))
    elif kind == "col3-sabc":
        src = _graph(args.input, rep)
    else:
        src = instance_from_dict(_read_json(args.input, rep))
    if kind == "split":
        sr = red.to_split_instance(src)
        rep.result = {
            "status": sr.status,
            "instance": sr.instance.to_dict() if sr.instance else None,
            "clique_side": list(sr.clique_side),
            "independent_side": list(sr.independent_side),
            "reason": sr.reason,
        }
        out = rep.result
    else:
        if args.target is None:
            raise InvalidInput(f"reduce {kind} needs --target")
        h = load_target(args.target, rep)
        if kind == "sat-pt":
            pred = tuple(_ints(args.predator)) or None
            if args.lift:
                from .target import associated_bipartite

                sm = associated_bipartite(h)
                art = red.sat_to_ptfree(src, sm.star, pred, check_free=not args.no_free_check)
                art = red.lift_reduction_to_nonbipartite(art, sm)
            else:
                art = red.sat_to_ptfree(src, h, pred, check_free=not args.no_free_check)
        elif kind == "col3-sabc":
            S = _ints(args.S) or [0, 1, 2]
            art = red.col3_to_sabc(src, h, S, check_free=not args.no_free_check)
        else:
            if args.u0 is None or args.u1 is None:
                raise InvalidInput("reduce sat-line needs --u0 and --u1")
            art = red.sat_to_linegraph(src, h, args.u0, args.u1)
        out = art.to_dict()
        rep.result = {"kind": art.kind, "vertices": art.instance.n, "freeness": art.freeness, "gadgets": art.gadgets}
        if art.freeness.get("status") == "cap-limited":
            rep.budgets_hit.append("freeness search cap")
        if args.verify:
            verdict = red.verify_reduction(art, _source_answer(kind, src), budget=None)
            rep.verification["equisatisfiable"] = verdict.ok
            rep.verification["message"] = verdict.message
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, sort_keys=True)
        rep.result["artifact_path"] = args.out
    elif kind != "split":
        rep.result["artifact"] = out
    if rep.verification.get("equisatisfiable") is False:
        return EXIT_NO, f"reduce {kind}: verification failed"
    return EXIT_YES, f"reduce {kind}: done"


def cmd_gadget(args, rep: RunReport):
    from . import gadgets as gd

    if args.action == "verify":
        g = gd.gadget_from_dict(_read_json(args.file, rep))
        v = gd.verify_gadget(g)
        rep.result = {"kind": g.spec.kind, "order": g.order, "ok": v.ok, "message": v.message}
        return (EXIT_YES if v else EXIT_NO), f"gadget verify: {v.message}"
    if args.target is None:
        raise InvalidInput("gadget synth needs --target")
    h = load_target(args.target, rep)
    c = _ints(args.colours)
    kind = args.kind
    need = {"neq": None, "or3": 2, "impl": 4, "dist": 4, "edge-neq": 2, "edge-or3": 2, "basis": 0}
    if kind not in need:
        raise InvalidInput(f"unknown gadget kind {kind!r}")
    if need[kind] is not None and len(c) != need[kind]:
        raise InvalidInput(f"gadget {kind} needs {need[kind]} colours")
    try:
        if kind == "neq":
            g = gd.synthesize_neq(h, c)
        elif kind == "dist":
            g = gd.distinguisher_path(h, *c)
        elif kind == "edge-neq":
            g = gd.assemble_edge_neq(h, *c)
        elif kind == "edge-or3":
            g = gd.assemble_edge_or3(h, *c)
        else:
            basis = gd.find_distinguisher_basis(h)
            if basis is None:
                raise GadgetNotFound("no distinguisher basis")
            if kind == "basis":
                rep.result = basis.to_dict()
                return EXIT_YES, "basis found"
            g = gd.assemble_or3(h, basis, *c) if kind == "or3" else gd.assemble_occurrence(h, basis, c[:2], c[2:])
    except GadgetNotFound as exc:
        rep.result = {"found": False, "reason": str(exc), "exhausted": exc.exhausted}
        return EXIT_NO, f"gadget {kind}: not found"
    if g is None:
        rep.result = {"found": False}
        return EXIT_NO, f"gadget {kind}: not found"
    rep.result = {"found": True, "gadget": g.to_dict()}
    rep.verification["gadget"] = gd.verify_gadget(g).message
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(g.to_dict(), fh, sort_keys=True)
    return EXIT_YES, f"gadget {kind}: order {g.order}"


def cmd_sep(args, rep: RunReport):
    from . import separators as sp

    g = _graph(args.graph, rep)
    if args.action == "verify":
        frac = Fraction(args.fraction)
        cert = sp.verify_balanced_separator(g, _ints(args.X), frac)
        rep.result = {"valid": cert is not None, "certificate": cert.to_dict() if cert else None}
        return (EXIT_YES if cert else EXIT_NO), "separator " + ("valid" if cert else "invalid")
    if args.method == "gyarfas":
        _, cert = sp.gyarfas_path(g, args.start)
    elif args.method == "bounded":
        cert = sp.bounded_connected_separator(g, args.k)
    else:
        cert = sp.bt_free_separator(g, args.t)
    rep.result = {"found": cert is not None, "certificate": cert.to_dict() if cert else None}
    if cert is not None:
        rep.verification["recheck"] = sp.verify_balanced_separator(g, cert.core, cert.fraction) is not None
        return EXIT_YES, f"separator core of size {len(cert.core)} ({cert.method})"
    return EXIT_NO, "no separator found"


def cmd_free_check(args, rep: RunReport):
    from .graph import contains_induced, parse_pattern

    g = _graph(args.graph, rep)
    found = {}
    for fam in args.family:
        pat = parse_pattern(fam)
        emb = contains_induced(g, pat, args.node_cap)
        found[pat.name] = list(emb) if emb is not None else None
    rep.result = {"free": all(v is None for v in found.values()), "witnesses": found}
    return (EXIT_YES if rep.result["free"] else EXIT_NO), "free" if rep.result["free"] else "pattern found"


def cmd_bench(args, rep: RunReport):
    from .bench import run_bench

    suite = _read_json(args.suite, rep)
    if args.workers is not None:
        suite["workers"] = args.workers
    import os

    out = run_bench(suite, args.out_dir, base_dir=os.path.dirname(os.path.abspath(args.suite)), plots=not args.no_plots)
    rep.result = out.to_dict()
    code = EXIT_YES if out.disagreements == 0 else EXIT_NO
    return code, f"bench: {len(out.rows)} solves, {out.disagreements} disagreements"


def cmd_corpus(args, rep: RunReport):
    from .corpus import generate_corpus

    spec = _read_json(args.spec, rep)
    if args.seed is not None:
        spec["seed"] = args.seed
    items = generate_corpus(spec, args.out_dir)
    rep.result = {"count": len(items), "out_dir": args.out_dir, "names": [it.name for it in items]}
    return EXIT_YES, f"corpus: {len(items)} instances"


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lhomlab", description="List homomorphism lab: solvers, reductions, gadgets")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    a = sub.add_parser("analyze", help="classify a target graph")
    a.add_argument("target")

    s = sub.add_parser("solve", help="decide an instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=["oracle", "branching", "winwin", "dp"], default="oracle")
    s.add_argument("--t", type=int, help="path length for branching, separator size for dp")
    s.add_argument("--claw", help="a,b,c for the win-win solver (default 2,2,2)")
    s.add_argument("--strategy", choices=["min-fill", "separator", "separator-recursive"], default="min-fill")
    s.add_argument("--budget", help="oracle or DP budget; 'none' disables")
    s.add_argument("--no-check", action="store_true", help="skip forbidden-subgraph checks")

    r = sub.add_parser("reduce", help="compile a hardness reduction")
    r.add_argument("kind", choices=["sat-pt", "col3-sabc", "sat-line", "split"])
    r.add_argument("input", help="DIMACS CNF, graph JSON or instance JSON")
    r.add_argument("--target")
    r.add_argument("--predator", help="a1,a2,b1,b2")
    r.add_argument("--lift", action="store_true", help="build over the associated bipartite graph and lift")
    r.add_argument("--S", help="three looped colours (default 0,1,2)")
    r.add_argument("--u0", type=int)
    r.add_argument("--u1", type=int)
    r.add_argument("--no-free-check", action="store_true")
    r.add_argument("--verify", action="store_true", help="compare with the source answer by brute force")
    r.add_argument("--out")

    g = sub.add_parser("gadget", help="synthesise or verify gadgets")
    gs = g.add_subparsers(dest="action", parser_class=_Parser)
    gsyn = gs.add_parser("synth")
    gsyn.add_argument("--target", required=True)
    gsyn.add_argument("--kind", required=True, choices=["neq", "or3", "impl", "dist", "edge-neq", "edge-or3", "basis"])
    gsyn.add_argument("--colours", help="comma-separated colours")
    gsyn.add_argument("--out")
    gver = gs.add_parser("verify")
    gver.add_argument("file")

    sp = sub.add_parser("sep", help="balanced separators")
    ss = sp.add_subparsers(dest="action", parser_class=_Parser)
    sf = ss.add_parser("find")
    sf.add_argument("graph")
    sf.add_argument("--t", type=int, default=2)
    sf.add_argument("--method", choices=["bt", "gyarfas", "bounded"], default="bt")
    sf.add_argument("--k", type=int, default=3)
    sf.add_argument("--start", type=int, default=0)
    sv = ss.add_parser("verify")
    sv.add_argument("graph")
    sv.add_argument("--X", required=True)
    sv.add_argument("--fraction", default="3/4")

    f = sub.add_parser("free-check", help="search for induced patterns")
    f.add_argument("graph")
    f.add_argument("--family", action="append", required=True, help="P6, S2,2,2, K3, Bp7,3, Bt7,3")
    f.add_argument("--node-cap", type=int, default=None)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("suite")
    b.add_argument("--out-dir", default="bench_out")
    b.add_argument("--workers", type=int)
    b.add_argument("--no-plots", action="store_true")

    c = sub.add_parser("corpus", help="generate a seeded instance corpus")
    c.add_argument("spec")
    c.add_argument("--out-dir", required=True)
    c.add_argument("--seed", type=int)
    return p


HANDLERS = {
    "analyze": cmd_analyze,
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "gadget": cmd_gadget,
    "sep": cmd_sep,
    "free-check": cmd_free_check,
    "bench": cmd_bench,
    "corpus": cmd_corpus,
}


def dispatch(argv=None, stdout=None, stderr=None) -> tuple[int, RunReport]:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    rep = RunReport(subcommand="")
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        if args.command is None or (args.command in ("gadget", "sep") and args.action is None):
            raise _Usage("missing subcommand")
        rep.subcommand = args.command
        code, summary = HANDLERS[args.command](args, rep)
    except _Usage as exc:
        code, summary = EXIT_USAGE, f"usage error: {exc}"
        rep.result = {"error": str(exc)}
    except (InvalidInput, PreconditionError) as exc:
        code, summary = EXIT_USAGE, f"{type(exc).__name__}: {exc}"
        rep.result = {"error": str(exc), "type": type(exc).__name__, "witness": _plain(getattr(exc, "witness", None))}
    except BudgetExceeded as exc:
        code, summary = EXIT_BUDGET, f"budget exhausted: {exc}"
        rep.budgets_hit.append(str(exc))
        rep.result = {"error": str(exc), "used": _plain(exc.used), "limit": _plain(exc.limit)}
    except (LabError, ValueError) as exc:
        code, summary = EXIT_USAGE, f"{type(exc).__name__}: {exc}"
        rep.result = {"error": str(exc), "type": type(exc).__name__}
    rep.timing = time.perf_counter() - t0
    rep.exit_code = code
    stdout.write(json.dumps(rep.to_dict(), sort_keys=True, default=str) + "\n")
    stderr.write(f"[{rep.subcommand or 'lhomlab'}] {summary} (exit {code}, {rep.timing:.2f}s)\n")
    return code, rep


def _plain(x):
    try:
        json.dumps(x)
        return x
    except TypeError:
        return repr(x)


def main(argv=None) -> int:
    code, _ = dispatch(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
