"""Conformal heat flow on the flat 2-torus with sphere target.

The flow couples a sphere-valued map f with a conformal factor v = e^{2u}:

    f_t = (1/v) (lap f + |df|^2 f)          (harmonic map flow when v = 1)
    v_t = 2 b |df|^2 - 2 a v                (linear in v; solved exactly per step)

The package provides periodic stencil operators, explicit and semi-implicit
steppers, a diagnostics engine for the energy identity / moment inequalities /
local energy bounds, scenario generators, and a file-based CLI.
"""

__version__ = "0.1.0"

from .grid import Grid, make_grid
from .fields import (
    MapField,
    ConformalField,
    FlowParams,
    ProjectionFailure,
    project_to_sphere,
)

__all__ = [
    "Grid",
    "make_grid",
    "MapField",
    "ConformalField",
    "FlowParams",
    "ProjectionFailure",
    "project_to_sphere",
    "__version__",
]
