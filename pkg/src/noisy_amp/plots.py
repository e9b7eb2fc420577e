"""PNG rendering of figure datasets, written next to the delimited output.

The CSV/JSON files are the primary interface; these renderings exist so a
figure command leaves something viewable without a plotting pipeline.  All
rendering is headless (Agg).
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render"]


def _numeric_columns(header, rows):
    cols = []
    for idx, name in enumerate(header):
        try:
            values = [float(row[idx]) for row in rows]
        except (TypeError, ValueError):
            continue
        cols.append((idx, name, np.array(values)))
    return cols


def _render_wigner(header, rows, path: str) -> None:
    xs = np.array([float(r[0]) for r in rows])
    ps = np.array([float(r[1]) for r in rows])
    ws = np.array([float(r[2]) for r in rows])
    x_axis = np.unique(xs)
    p_axis = np.unique(ps)
    grid = ws.reshape(len(p_axis), len(x_axis))
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    bound = max(abs(grid.min()), abs(grid.max()), 1e-12)
    mesh = ax.pcolormesh(
        x_axis, p_axis, grid, cmap="RdBu_r", vmin=-bound, vmax=bound, shading="auto"
    )
    fig.colorbar(mesh, ax=ax, label="W")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_lines(title, header, rows, path: str, group_column: str | None) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    if group_column and header and header[0] == group_column:
        groups = {}
        for row in rows:
            groups.setdefault(row[0], []).append(row[1:])
        for key, sub_rows in groups.items():
            _plot_columns(ax, header[1:], sub_rows, suffix=f" ({group_column}={key:g})")
    else:
        _plot_columns(ax, header, rows, suffix="")
    ax.set_xlabel(header[1] if group_column and header[0] == group_column else header[0])
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_columns(ax, header, rows, suffix: str) -> None:
    cols = _numeric_columns(header, rows)
    if not cols:
        return
    x = cols[0][2]
    for _, name, values in cols[1:]:
        y = values.copy()
        y[~np.isfinite(y)] = math.nan
        ax.plot(x, y, marker=".", label=f"{name}{suffix}")


def render(command: str, header: list[str], rows: list[list], path: str) -> str:
    """Render one dataset to ``path`` (PNG); returns the path."""
    if header[:3] == ["x", "p", "W"]:
        _render_wigner(header, rows, path)
    elif header and header[0] == "alpha_mod":
        _render_lines(command, header, rows, path, group_column="alpha_mod")
    else:
        _render_lines(command, header, rows, path, group_column=None)
    return path
