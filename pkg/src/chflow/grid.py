"""Periodic grid geometry shared by every field type."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAU = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform n-by-n periodic grid on a square of side ``length``.

    Spacing is always ``length / n``; index arithmetic wraps mod n.
    """

    n: int
    length: float = TAU

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def area(self) -> float:
        return self.length * self.length

    def wrap(self, i: int) -> int:
        return i % self.n

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as (x, y) arrays of shape (n, n), 'ij' indexing."""
        ax = np.arange(self.n) * self.h
        return np.meshgrid(ax, ax, indexing="ij")

    def periodic_delta(self, coord: np.ndarray | float, center: float) -> np.ndarray:
        """Signed displacement coord - center wrapped into [-length/2, length/2)."""
        d = np.asarray(coord, dtype=float) - center
        d = np.mod(d + 0.5 * self.length, self.length) - 0.5 * self.length
        return d

    def periodic_distance(self, center: tuple[float, float]) -> np.ndarray:
        """Distance from every node to ``center`` under periodic wrapping."""
        x, y = self.coords()
        dx = self.periodic_delta(x, center[0])
        dy = self.periodic_delta(y, center[1])
        return np.hypot(dx, dy)


def make_grid(n: int, length: float = TAU) -> Grid:
    """Validated constructor: at least 8 nodes per axis, positive side length."""
    n = int(n)
    if n < 8:
        raise ValueError(f"grid needs at least 8 nodes per axis, got n={n}")
    length = float(length)
    if not length > 0.0:
        raise ValueError(f"grid length must be positive, got {length}")
    return Grid(n, length)
