"""CSV output and matplotlib figures for benchmark runs."""

from __future__ import annotations

import csv
import os

from matplotlib.figure import Figure

CSV_FIELDS = ("instance", "algo", "status", "seconds", "n", "m", "k", "error")
STATUS_ORDER = ("yes", "no", "timeout", "budget", "precondition", "error", "invalid-witness")


def write_csv(rows: list, path: str, fields=CSV_FIELDS) -> str:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields), extrasaction="ignore")
        w.writeheader()
        for r in rows:
            out = dict(r)
            if isinstance(out.get("seconds"), float):
                out["seconds"] = f"{out['seconds']:.6f}"
            w.writerow(out)
    return path


def write_agreement_csv(agreement: dict, path: str) -> str:
    cols = ("agree", "disagree", "unanswered", "reference_unanswered", "answered_where_reference_failed")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("algo",) + cols)
        for algo, agg in sorted(agreement.items()):
            w.writerow((algo,) + tuple(agg[c] for c in cols))
    return path


def plot_runtimes(rows: list, path: str) -> str:
    """Solve time against instance size, one marker series per algorithm."""
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    for algo in sorted({r["algo"] for r in rows}):
        pts = [(r["n"], max(r["seconds"], 1e-6)) for r in rows if r["algo"] == algo]
        ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=14, alpha=0.7, label=algo)
    ax.set_yscale("log")
    ax.set_xlabel("instance vertices")
    ax.set_ylabel("seconds")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    return path


def plot_status(rows: list, path: str) -> str:
    """Stacked bar of outcome counts per algorithm."""
    algos = sorted({r["algo"] for r in rows})
    fig = Figure(figsize=(6, 4))
    ax = fig.subplots()
    bottom = [0] * len(algos)
    for status in STATUS_ORDER:
        counts = [sum(1 for r in rows if r["algo"] == a and r["status"] == status) for a in algos]
        if any(counts):
            ax.bar(algos, counts, bottom=bottom, label=status)
            bottom = [b + c for b, c in zip(bottom, counts)]
    ax.set_ylabel("instances")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    return path


def render_bench(rows: list, agreement: dict, out_dir: str, stem: str = "bench", plots: bool = True) -> list:
    os.makedirs(out_dir, exist_ok=True)
    files = [
        write_csv(rows, os.path.join(out_dir, f"{stem}.csv")),
        write_agreement_csv(agreement, os.path.join(out_dir, f"{stem}_agreement.csv")),
    ]
    if plots and rows:
        files.append(plot_runtimes(rows, os.path.join(out_dir, f"{stem}_runtime.png")))
        files.append(plot_status(rows, os.path.join(out_dir, f"{stem}_status.png")))
    return files
