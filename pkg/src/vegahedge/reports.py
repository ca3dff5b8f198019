"""Trajectory/report serialization and figure rendering.

CSV is the data contract: columns ``t, q_1..q_N, v_1..v_N, exposure`` with
numbers printed to 17 significant digits so a read-back is bit-faithful.
Figures are a convenience layer rendered next to the delimited output.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .closed_form import HedgeInputs, Trajectory
from .errors import ConfigError
from .pnl import ComparisonReport, PnLSampleSet


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_trajectory_csv(tr: Trajectory, inputs: HedgeInputs, path: str | Path) -> Path:
    path = Path(path)
    n = tr.n
    exposure = inputs.exposure_of(tr.positions)
    header = ["t"] + [f"q_{i + 1}" for i in range(n)] + [f"v_{i + 1}" for i in range(n)] + ["exposure"]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, t in enumerate(tr.times):
            row = [t, *tr.positions[k], *tr.velocities[k], exposure[k]]
            writer.writerow([_fmt(x) for x in row])
    return path


def read_trajectory_csv(path: str | Path) -> Trajectory:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "t" or (len(header) - 2) % 2 != 0:
            raise ConfigError(f"{path} is not a trajectory CSV (bad header)")
        n = (len(header) - 2) // 2
        rows = [[float(x) for x in row] for row in reader if row]
    if not rows:
        raise ConfigError(f"{path} contains no trajectory rows")
    data = np.asarray(rows)
    return Trajectory(
        times=data[:, 0],
        positions=data[:, 1 : 1 + n],
        velocities=data[:, 1 + n : 1 + 2 * n],
    )


def write_json_report(report: dict, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return path


def plot_schedule(tr: Trajectory, inputs: HedgeInputs, path: str | Path) -> Path:
    path = Path(path)
    fig, (ax_q, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for i in range(tr.n):
        ax_q.plot(tr.times, tr.positions[:, i], label=f"q_{i + 1}")
    ax_q.set_ylabel("position (option units)")
    ax_q.legend(loc="best", fontsize=8)
    ax_q.grid(alpha=0.3)
    ax_e.plot(tr.times, inputs.exposure_of(tr.positions), color="tab:red")
    ax_e.set_xlabel("time")
    ax_e.set_ylabel("vega exposure")
    ax_e.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_oracle_overlay(
    plan: Trajectory, oracle: Trajectory, path: str | Path
) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i in range(plan.n):
        ax.plot(plan.times, plan.positions[:, i], label=f"plan q_{i + 1}")
        ax.plot(
            oracle.times, oracle.positions[:, i], "--", label=f"oracle q_{i + 1}"
        )
    ax.set_xlabel("time")
    ax.set_ylabel("position (option units)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_pnl_hist(samples: PnLSampleSet, path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.hist(samples.terminal_pnl, bins=80, color="tab:blue", alpha=0.8)
    ax.set_xlabel("terminal PnL")
    ax.set_ylabel("paths")
    ax.set_title(samples.strategy_id)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_comparison(
    report: ComparisonReport, a: Trajectory, b: Trajectory, path: str | Path
) -> Path:
    path = Path(path)
    fig, (ax_q, ax_d) = plt.subplots(1, 2, figsize=(10, 4.5))
    for i in range(a.n):
        ax_q.plot(a.times, a.positions[:, i], label=f"a q_{i + 1}")
        ax_q.plot(b.times, b.positions[:, i], "--", label=f"b q_{i + 1}")
    ax_q.set_xlabel("time")
    ax_q.set_ylabel("position")
    ax_q.legend(loc="best", fontsize=8)
    ax_q.grid(alpha=0.3)
    ax_d.hist(report.pnl_diff, bins=80, color="tab:green", alpha=0.8)
    ax_d.axvline(0.0, color="k", lw=0.8)
    ax_d.set_xlabel("paired PnL difference (a - b)")
    ax_d.set_ylabel("paths")
    ax_d.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
