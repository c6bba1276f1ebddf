"""Cell-centred square grid covering the disk of radius R."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels


@dataclass(frozen=True, eq=False)
class Grid:
    radius: float
    n: int

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / self.n

    @property
    def origin(self) -> float:
        """Coordinate of the first cell centre along either axis."""
        return -self.radius + 0.5 * self.spacing

    @cached_property
    def x(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.n)

    @cached_property
    def z(self) -> np.ndarray:
        X, Y = np.meshgrid(self.x, self.x, indexing="ij")
        return X + 1j * Y

    @cached_property
    def r(self) -> np.ndarray:
        return np.abs(self.z)

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    def disk(self, radius=None) -> np.ndarray:
        return self.r <= (self.radius if radius is None else radius)

    def unknowns(self) -> np.ndarray:
        """Cells solved for; the rest carry boundary values (two-cell collar for the stencil)."""
        return self.r <= self.radius - 2.0 * self.spacing

    def d_s(self, a):
        return kernels.diff4(a, self.spacing, 0)

    def d_t(self, a):
        return kernels.diff4(a, self.spacing, 1)

    def d_z(self, a):
        return 0.5 * (self.d_s(a) - 1j * self.d_t(a))

    def d_zbar(self, a):
        return 0.5 * (self.d_s(a) + 1j * self.d_t(a))

    def integrate(self, density, mask=None) -> float:
        """Midpoint rule; fixed row-major summation order."""
        vals = density if mask is None else np.where(mask, density, 0.0)
        return float(np.sum(vals, dtype=np.float64) * self.cell_area)

    def sample(self, field, points):
        return kernels.bilinear(field, self.origin, self.spacing, points)
