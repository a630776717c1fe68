"""Render scenario results as figures next to their CSV data.

Figures are written with the Agg backend, so reports work in headless
environments; nothing is ever displayed interactively.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cli import emit_sweep_csv, emit_trajectory_csv
from .qsl import ScenarioRun, SweepRow

_FIG_KW = {"figsize": (6.4, 4.0), "dpi": 150}


def _finish(fig, ax, xlabel: str, ylabel: str, title: str, path: Path) -> None:
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _scenario_label(run: ScenarioRun) -> str:
    return f"{run.model}, {run.initial}, {run.measure}"


def plot_measures(run: ScenarioRun, path: Path) -> None:
    """Concurrence, Bures measures and separable fidelity along the run."""
    t = run.trajectory.times
    s = run.trajectory.samples
    fig, ax = plt.subplots(**_FIG_KW)
    ax.plot(t, s.concurrence, label="concurrence")
    ax.plot(t, s.e_bures, label="Bures entanglement")
    if not np.all(np.isnan(s.d_bures)):
        ax.plot(t, s.d_bures, "--", label="Bures discord")
    ax.plot(t, s.f_p, label="separable fidelity")
    _finish(fig, ax, "t", "measure", f"Correlation measures ({_scenario_label(run)})", path)


def plot_speed_limit(run: ScenarioRun, path: Path) -> None:
    """Per-norm speed limit times treating each node as the end time."""
    t = run.trajectory.times
    fig, ax = plt.subplots(**_FIG_KW)
    for attr, label in (("tau_op", "op norm"), ("tau_hs", "hs norm"), ("tau_tr", "tr norm")):
        ax.plot(t, [getattr(r, attr) for r in run.results], label=label)
    ax.plot(t, t, ":", color="gray", label="actual driving time")
    _finish(fig, ax, "end time", "speed limit time",
            f"Speed limit times ({_scenario_label(run)})", path)


def plot_norm_averages(run: ScenarioRun, path: Path) -> None:
    """Time-averaged norm sums entering the bound denominators."""
    t = run.trajectory.times
    fig, ax = plt.subplots(**_FIG_KW)
    for attr, label in (("k_op", "K_op"), ("k_hs", "K_hs"), ("k_tr", "K_tr")):
        ax.plot(t, [getattr(r, attr) for r in run.results], label=label)
    _finish(fig, ax, "end time", "norm average",
            f"Norm averages ({_scenario_label(run)})", path)


def plot_sweep(rows: list[SweepRow], param: str, path: Path) -> None:
    """End-time speed limits across a one-parameter family."""
    values = [r.value for r in rows]
    fig, ax = plt.subplots(**_FIG_KW)
    for attr, label in (("tau_op", "op norm"), ("tau_hs", "hs norm"), ("tau_tr", "tr norm")):
        ax.plot(values, [getattr(r, attr) for r in rows], marker=".", label=label)
    _finish(fig, ax, param, "speed limit time", f"Speed limit sweep over {param}", path)


def render_report(
    run: ScenarioRun,
    outdir: str | Path,
    sweep_rows: list[SweepRow] | None = None,
    sweep_param: str | None = None,
) -> list[Path]:
    """Write trajectory CSV plus figures (and sweep CSV/figure when given).

    Returns the list of written paths.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    csv_path = outdir / "trajectory.csv"
    csv_path.write_text(emit_trajectory_csv(run), encoding="utf-8")
    written.append(csv_path)

    for name, plot in (
        ("measures.png", plot_measures),
        ("speed_limit.png", plot_speed_limit),
        ("norm_averages.png", plot_norm_averages),
    ):
        path = outdir / name
        plot(run, path)
        written.append(path)

    if sweep_rows:
        sweep_csv = outdir / "sweep.csv"
        sweep_csv.write_text(emit_sweep_csv(sweep_rows), encoding="utf-8")
        written.append(sweep_csv)
        sweep_png = outdir / "sweep.png"
        plot_sweep(sweep_rows, sweep_param or "parameter", sweep_png)
        written.append(sweep_png)
    return written
