"""CSV time-series tables written by flow runs.

A run table is a plain CSV with a header row and a leading strictly
increasing ``t`` column; compare tables have the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class RunTable:
    names: list[str]
    data: np.ndarray  # (rows, columns)

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]

    def col(self, name: str) -> np.ndarray:
        try:
            k = self.names.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}; table has "
                           f"{', '.join(self.names)}") from None
        return self.data[:, k]


def load_run_table(path) -> RunTable:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty table")
        names = header.split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[0] < 2:
        raise ValueError(f"{path}: need at least 2 data rows, "
                         f"got {data.shape[0]}")
    if data.shape[1] != len(names):
        raise ValueError(f"{path}: header names {len(names)} columns, "
                         f"body has {data.shape[1]}")
    if names[0] != "t":
        raise ValueError(f"{path}: first column must be t, got {names[0]!r}")
    if not np.all(np.diff(data[:, 0]) > 0.0):
        raise ValueError(f"{path}: t column must be strictly increasing")
    return RunTable(names, data)


def fit_log_slope(t, series) -> float:
    """Least-squares slope of log(series) against t.

    The series must be strictly positive; a pure exponential c*exp(s*t)
    gives back s to rounding.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(series, dtype=float)
    if t.shape != y.shape or t.size < 2:
        raise ValueError("need two or more samples of equal length")
    if np.any(y <= 0.0):
        raise ValueError("series must be strictly positive for a log fit")
    return float(np.polyfit(t, np.log(y), 1)[0])
