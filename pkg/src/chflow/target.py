"""Geometry of the round-sphere target.

For maps into the unit sphere S^{L-1} in R^L the second fundamental form
contracts to A(f)(df,df) = |df|^2 f, so the tension field is
tau(f) = lap f + |df|^2 f and the flatness bound on A is C_N = 1.
"""

from __future__ import annotations

import numpy as np

from . import stencil
from .fields import MapField
from .grid import Grid

#: sup-norm bound on the second fundamental form of the unit sphere.
C_N = 1.0


def second_fundamental_form(f: np.ndarray, grid: Grid) -> np.ndarray:
    """A(f)(df,df) with the centered density."""
    return stencil.density(f, grid)[..., None] * f


def tension(field: MapField) -> np.ndarray:
    """Tension field lap f + |df|^2 f with centered differences.

    On exactly unit-norm fields this is tangent to the sphere up to an
    O(h^2) defect; the integrator uses the neighbour-average density
    internally to make the tangency exact.
    """
    f = field.values
    return stencil.laplacian(f, field.grid) + second_fundamental_form(f, field.grid)


def tension_neighbor(field: MapField) -> np.ndarray:
    """Tension with the neighbour-average density (tangent to rounding)."""
    f = field.values
    grid = field.grid
    dnb = stencil.density_neighbor(f, grid)
    return stencil.laplacian(f, grid) + dnb[..., None] * f


def tension_l2(field: MapField) -> float:
    """L^2 norm of the centered tension over the torus."""
    tau = tension(field)
    return float(np.sqrt(stencil.integrate((tau * tau).sum(axis=-1), field.grid)))
