"""Field containers: sphere-valued maps, conformal factor, flow parameters."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Grid

SPHERE_TOL = 1e-12
MIN_PROJECT_NORM = 1e-8


class ProjectionFailure(RuntimeError):
    """A node is too close to the origin to normalize; the step was too large."""


@dataclass
class MapField:
    """Unit-sphere-valued map sampled on a periodic grid.

    ``values`` has shape (n, n, L) with L >= 3 ambient components; every node
    must sit on the unit sphere to within SPHERE_TOL.
    """

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.shape[0] != self.grid.n or v.shape[1] != self.grid.n:
            raise ValueError(f"map values must have shape (n, n, L), got {v.shape}")
        if v.shape[2] < 3:
            raise ValueError(f"ambient dimension must be >= 3, got {v.shape[2]}")
        self.values = np.ascontiguousarray(v)

    @property
    def ambient_dim(self) -> int:
        return self.values.shape[2]

    def at(self, i: int, j: int) -> np.ndarray:
        """Node value with periodic index wrapping."""
        return self.values[self.grid.wrap(i), self.grid.wrap(j)]

    def norms(self) -> np.ndarray:
        return np.sqrt((self.values * self.values).sum(axis=-1))

    def max_sphere_defect(self) -> float:
        return float(np.abs(self.norms() - 1.0).max())

    def assert_on_sphere(self, tol: float = SPHERE_TOL) -> None:
        defect = self.max_sphere_defect()
        if defect > tol:
            raise ValueError(f"map leaves the unit sphere by {defect:.3e} (tol {tol:.1e})")

    def copy(self) -> "MapField":
        return MapField(self.values.copy(), self.grid)


@dataclass
class ConformalField:
    """Conformal factor v = e^{2u} on the grid; strictly positive, shape (n, n)."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"conformal factor must have shape (n, n), got {v.shape}")
        if not np.all(v > 0.0):
            raise ValueError("conformal factor must be strictly positive everywhere")
        self.values = np.ascontiguousarray(v)

    @classmethod
    def ones(cls, grid: Grid) -> "ConformalField":
        return cls(np.ones((grid.n, grid.n)), grid)

    def u(self) -> np.ndarray:
        """Log form u = 0.5 log v."""
        return 0.5 * np.log(self.values)

    def copy(self) -> "ConformalField":
        return ConformalField(self.values.copy(), self.grid)


def project_to_sphere(raw: np.ndarray, grid: Grid) -> MapField:
    """Normalize each node of ``raw`` onto the unit sphere.

    Raises ProjectionFailure when any node norm falls below MIN_PROJECT_NORM.
    """
    raw = np.asarray(raw, dtype=np.float64)
    nrm = np.sqrt((raw * raw).sum(axis=-1))
    worst = float(nrm.min())
    if worst < MIN_PROJECT_NORM:
        raise ProjectionFailure(
            f"cannot normalize: node norm {worst:.3e} below {MIN_PROJECT_NORM:.1e}"
        )
    return MapField(raw / nrm[..., None], grid)


@dataclass
class FlowParams:
    """Coefficients and stepping controls for the conformal flow.

    a, b are the conformal-factor coefficients (a = b = 0 is the plain
    harmonic map flow); c_n is the bound on the target's second fundamental
    form (1 for the round unit sphere).
    """

    a: float = 1.0
    b: float = 4.0
    c_n: float = 1.0
    scheme: str = "explicit"
    cfl: float = 0.25
    imex_dt_cap: float | None = None  # None -> 0.1 * h chosen at run time
    imex_tol: float = 1e-10
    imex_max_iter: int = 2000

    def __post_init__(self):
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError("flow coefficients a, b must be nonnegative")
        if self.scheme not in ("explicit", "imex"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if not (self.a == 0.0 and self.b == 0.0):
            floor = 2.0 * self.c_n * self.c_n + self.c_n
            if self.b <= floor:
                warnings.warn(
                    f"standing assumption b > 2*c_n^2 + c_n violated (b={self.b}, "
                    f"bound {floor}); moment-growth constants may lose positivity",
                    stacklevel=2,
                )

    @property
    def is_hmf(self) -> bool:
        return self.a == 0.0 and self.b == 0.0

    def c4(self, p: float) -> float:
        """Dissipation constant 2b(p+1) - (p+2)c_n - 2(p+2)c_n^2."""
        return (
            2.0 * self.b * (p + 1.0)
            - (p + 2.0) * self.c_n
            - 2.0 * (p + 2.0) * self.c_n * self.c_n
        )

    def with_(self, **kw) -> "FlowParams":
        return replace(self, **kw)
