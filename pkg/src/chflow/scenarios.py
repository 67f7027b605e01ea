"""Deterministic initial-data generators.

Every generator is a pure function of the Scenario fields, the grid, and
the ambient dimension, so identical inputs give bit-identical fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import MapField, project_to_sphere
from .grid import Grid

KINDS = ("constant", "circle", "bubble", "perturbed", "traveling")

#: largest wavenumber in the perturbation basis; low order keeps the data
#: smooth enough for the second-order stencil accuracy claims.
_MAX_MODE = 3


@dataclass(frozen=True)
class Scenario:
    kind: str
    amplitude: float = 0.0
    scale: float = 0.2
    center: tuple[float, float] | None = None
    seed: int = 1234

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")


def _center(s: Scenario, grid: Grid) -> tuple[float, float]:
    if s.center is None:
        return (0.5 * grid.length, 0.5 * grid.length)
    return s.center


def constant_map(grid: Grid, ambient_dim: int = 3) -> MapField:
    values = np.zeros((grid.n, grid.n, ambient_dim))
    values[..., -1] = 1.0
    return MapField(values, grid)


def circle_map(grid: Grid, ambient_dim: int = 3) -> MapField:
    x, _ = grid.coords()
    theta = (2.0 * np.pi / grid.length) * x
    values = np.zeros((grid.n, grid.n, ambient_dim))
    values[..., 0] = np.cos(theta)
    values[..., 1] = np.sin(theta)
    return MapField(values, grid)


def bubble_map(s: Scenario, grid: Grid, ambient_dim: int = 3) -> MapField:
    """Degree-1 inverse-stereographic profile at scale lam, blended to the
    north pole between radius 4*lam and 8*lam by a cosine ramp."""
    lam = s.scale
    if lam < grid.h:
        raise ValueError(
            f"bubble scale {lam:g} below grid spacing {grid.h:g}")
    if 8.0 * lam > 0.5 * grid.length:
        raise ValueError(
            f"bubble cutoff radius 8*{lam:g} exceeds half the domain")
    cx, cy = _center(s, grid)
    x, y = grid.coords()
    dx = grid.periodic_delta(x, cx) / lam
    dy = grid.periodic_delta(y, cy) / lam
    ssq = dx * dx + dy * dy
    denom = ssq + 1.0
    rho = np.hypot(grid.periodic_delta(x, cx), grid.periodic_delta(y, cy))
    ramp = np.cos((np.pi / (8.0 * lam)) * (rho - 4.0 * lam)) ** 2
    w = np.where(rho <= 4.0 * lam, 1.0, np.where(rho < 8.0 * lam, ramp, 0.0))
    raw = np.zeros((grid.n, grid.n, ambient_dim))
    raw[..., 0] = w * (2.0 * dx / denom)
    raw[..., 1] = w * (2.0 * dy / denom)
    raw[..., -1] = w * ((ssq - 1.0) / denom) + (1.0 - w)
    return project_to_sphere(raw, grid)


def perturbed_map(s: Scenario, grid: Grid, ambient_dim: int = 3) -> MapField:
    """North pole displaced by a seeded random trigonometric polynomial.

    Modes run over the half-plane kx in 1..3 (all ky) plus kx = 0, ky in
    1..3; coefficients are standard normals drawn in a fixed order and the
    sum is normalized to unit variance, so `amplitude` sets the pointwise
    displacement scale directly.
    """
    modes = [(kx, ky) for kx in range(_MAX_MODE + 1)
             for ky in range(-_MAX_MODE, _MAX_MODE + 1)
             if kx > 0 or (kx == 0 and ky > 0)]
    x, y = grid.coords()
    scale = 2.0 * np.pi / grid.length
    xs, ys = scale * x, scale * y
    rng = np.random.default_rng(s.seed)
    norm = 1.0 / math.sqrt(2.0 * len(modes))
    raw = np.zeros((grid.n, grid.n, ambient_dim))
    raw[..., -1] = 1.0
    for c in range(ambient_dim):
        acc = np.zeros((grid.n, grid.n))
        for kx, ky in modes:
            phase = kx * xs + ky * ys
            cos_c, sin_c = rng.standard_normal(2)
            acc += cos_c * np.cos(phase) + sin_c * np.sin(phase)
        raw[..., c] += s.amplitude * norm * acc
    return project_to_sphere(raw, grid)


def generate(s: Scenario, grid: Grid, ambient_dim: int = 3) -> MapField:
    if ambient_dim < 3:
        raise ValueError("ambient dimension must be at least 3")
    if s.kind == "constant":
        return constant_map(grid, ambient_dim)
    if s.kind == "circle":
        return circle_map(grid, ambient_dim)
    if s.kind in ("bubble", "traveling"):
        return bubble_map(s, grid, ambient_dim)
    if s.kind == "perturbed":
        return perturbed_map(s, grid, ambient_dim)
    raise ValueError(f"unknown scenario kind {s.kind!r}")
