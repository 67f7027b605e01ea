"""CHFSNAP1 field snapshots.

Format: one header line ``CHFSNAP1 n=<n> L=<L> t=<t>`` followed by n*n rows
of L map components and the conformal factor, row-major in the first grid
index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Snapshot:
    n: int
    ambient: int
    t: float
    f: np.ndarray  # (n, n, ambient) unit-sphere map
    v: np.ndarray  # (n, n) conformal factor

    def u(self) -> np.ndarray:
        """Log conformal factor u = 0.5 log v."""
        return 0.5 * np.log(self.v)

    def grad2(self, length: float = 2.0 * np.pi) -> np.ndarray:
        """Centered-difference energy density |df|^2 on the periodic grid.

        The file does not carry the box size; pass ``length`` when the run
        used a non-default domain (a uniform rescale, so maxima locations
        are unaffected either way).
        """
        inv2h = self.n / (2.0 * length)
        gx = (np.roll(self.f, -1, axis=0) - np.roll(self.f, 1, axis=0)) * inv2h
        gy = (np.roll(self.f, -1, axis=1) - np.roll(self.f, 1, axis=1)) * inv2h
        return (gx * gx).sum(axis=-1) + (gy * gy).sum(axis=-1)


def load_snapshot(path) -> Snapshot:
    with open(path) as fh:
        head = fh.readline().split()
        if len(head) != 4 or head[0] != "CHFSNAP1":
            raise ValueError(f"{path}: not a CHFSNAP1 file")
        try:
            n = int(head[1].removeprefix("n="))
            ambient = int(head[2].removeprefix("L="))
            t = float(head[3].removeprefix("t="))
        except ValueError:
            raise ValueError(f"{path}: malformed CHFSNAP1 header") from None
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (n * n, ambient + 1):
        raise ValueError(f"{path}: body shape {data.shape} does not match "
                         f"header n={n} L={ambient}")
    f = data[:, :ambient].reshape(n, n, ambient)
    v = data[:, ambient].reshape(n, n)
    if np.any(v <= 0.0):
        raise ValueError(f"{path}: conformal factor must be positive")
    return Snapshot(n, ambient, t, f, v)
