"""Plotting companion for flow-run outputs.

Consumes only the files a run leaves behind — run.csv / compare.csv tables
and CHFSNAP1 snapshots — and renders PNG figures.
"""

from .plots import plot_snapshot, plot_timeseries
from .snapshots import Snapshot, load_snapshot
from .tables import RunTable, fit_log_slope, load_run_table

__version__ = "0.1.0"

__all__ = [
    "RunTable", "Snapshot", "fit_log_slope", "load_run_table",
    "load_snapshot", "plot_snapshot", "plot_timeseries", "__version__",
]
