"""Optional figure rendering for sweep and simulation reports.

CSV is the contract; figures are a convenience rendered next to it with a
non-interactive matplotlib backend.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _numeric_columns(rows: list[dict], skip: tuple[str, ...]) -> list[str]:
    numeric = []
    for name, value in rows[0].items():
        if name in skip:
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            continue
        numeric.append(name)
    return numeric


def render_sweep_figure(rows: list[dict], path: str) -> None:
    """Line plots of every numeric column against the sweep axis."""
    if not rows:
        raise ValueError("no rows to plot")
    feasible = [r for r in rows if r.get("status", "feasible") == "feasible"]
    if not feasible:
        raise ValueError("no feasible rows to plot")
    x = [r["axis_value"] for r in feasible]
    columns = _numeric_columns(
        feasible, skip=("sweep_index", "axis_value", "seed", "trials")
    )
    n = len(columns)
    ncols = min(3, max(1, n))
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.2 * nrows), squeeze=False)
    axis_name = feasible[0].get("axis", "value")
    for ax, column in zip(axes.flat, columns):
        ax.plot(x, [r[column] for r in feasible], marker="o", markersize=3)
        ax.set_xlabel(axis_name)
        ax.set_ylabel(column)
        ax.grid(alpha=0.3)
    for ax in axes.flat[n:]:
        ax.set_visible(False)
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_rows_figure(rows: list[dict], path: str) -> None:
    """Bar chart of the numeric columns of one or few rows (eval/simulate)."""
    if not rows:
        raise ValueError("no rows to plot")
    columns = _numeric_columns(rows, skip=("seed",))
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(columns)), 4.0))
    values = [rows[0][c] for c in columns]
    ax.bar(range(len(columns)), values)
    ax.set_xticks(range(len(columns)))
    ax.set_xticklabels(columns, rotation=60, ha="right", fontsize=8)
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
