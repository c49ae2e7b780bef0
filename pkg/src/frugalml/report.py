"""Delimited outputs and the figures rendered next to them.

Every report path writes machine-readable data (JSONL trial logs, CSV
curves) and drops a rendered PNG alongside so a run can be eyeballed
without another tool: the fit figure shows the anytime error curve over
the trial-cost scatter, the replay figure overlays per-policy curves.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

__all__ = [
    "write_curve_csv",
    "read_curve_csv",
    "render_fit_figure",
    "render_replay_figure",
]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def write_curve_csv(curve: list[tuple[float, float]], path: str | Path) -> None:
    """Two columns: elapsed, best_error."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["elapsed", "best_error"])
        for elapsed, best in curve:
            writer.writerow([repr(float(elapsed)), repr(float(best))])


def read_curve_csv(path: str | Path) -> list[tuple[float, float]]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [(float(a), float(b)) for a, b in reader]


def render_fit_figure(trials, path: str | Path) -> None:
    """Best-error staircase plus per-trial cost scatter against elapsed time."""
    plt = _pyplot()
    fig, (ax_err, ax_cost) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    times = [t.elapsed_at_finish for t in trials]
    best = []
    cur = math.inf
    for t in trials:
        cur = min(cur, t.validation_error)
        best.append(cur)
    ax_err.step(times, best, where="post", color="tab:blue", lw=1.8)
    ax_err.plot(times, [t.validation_error for t in trials], ".", color="0.6", ms=4)
    ax_err.set_ylabel("validation error")
    ax_err.set_title("best error and individual trials")
    learners = sorted({t.learner for t in trials})
    for name in learners:
        pts = [(t.elapsed_at_finish, t.cost) for t in trials if t.learner == name]
        ax_cost.plot([p[0] for p in pts], [p[1] for p in pts], "o", ms=4, label=name)
    ax_cost.set_yscale("log")
    ax_cost.set_xlabel("elapsed (s)")
    ax_cost.set_ylabel("trial cost (s)")
    ax_cost.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_replay_figure(curves: dict[str, list[tuple[float, float]]], path: str | Path) -> None:
    """Overlay of per-policy anytime curves."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for policy, curve in curves.items():
        if not curve:
            continue
        xs = [p[0] for p in curve]
        ys = [p[1] for p in curve]
        ax.step(xs, ys, where="post", lw=1.6, label=policy)
    ax.set_xscale("log")
    ax.set_xlabel("elapsed (synthetic s)")
    ax.set_ylabel("best error")
    ax.set_title("anytime performance by policy")
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
