"""Matplotlib renderings of run tables and snapshots (Agg backend, PNG)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .snapshots import Snapshot
from .tables import RunTable


def plot_timeseries(table: RunTable, cols, out_path, logy=False, title=None):
    """Line plot of the named columns against t; returns out_path."""
    missing = [c for c in cols if c not in table.names]
    if missing:
        raise KeyError(f"unknown columns: {', '.join(missing)}")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in cols:
        ax.plot(table.t, table.col(name), label=name)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(", ".join(cols))
    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path


def plot_snapshot(snap: Snapshot, out_path, length=2.0 * np.pi):
    """Side-by-side heat maps of |df|^2 and u = 0.5 log v; returns out_path."""
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 4.2))
    extent = (0.0, length, 0.0, length)
    panels = ((snap.grad2(length), "|df|^2"), (snap.u(), "u = 0.5 log v"))
    for ax, (field, label) in zip(axes, panels):
        # the first array axis is x, so transpose to put x horizontal
        im = ax.imshow(field.T, origin="lower", extent=extent, cmap="viridis")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(f"{label} at t = {snap.t:g}")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return out_path
