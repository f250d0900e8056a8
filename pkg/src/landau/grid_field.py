"""Uniform cell-centered velocity grid and field containers.

Provides the quadrature, differential stencils, polynomial weights and
level-set decompositions that every other module builds on.  Nodes sit at
cell centers, so no node ever lands on v = 0 and singular kernels are
evaluated only off the origin.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

_negative_clip_events = 0


@dataclass(frozen=True)
class VelocityGrid:
    """Cell-centered cubic grid on [-l, l]^3 with spacing h = 2l/n."""

    n: int
    l: float
    h: float

    @cached_property
    def axis(self) -> np.ndarray:
        """1-D node coordinates -l + (i + 1/2) h."""
        return -self.l + (np.arange(self.n) + 0.5) * self.h

    @cached_property
    def coords(self) -> np.ndarray:
        """Node coordinates, shape (3, n, n, n)."""
        vx, vy, vz = np.meshgrid(self.axis, self.axis, self.axis, indexing="ij")
        return np.stack((vx, vy, vz))

    @cached_property
    def radius2(self) -> np.ndarray:
        c = self.coords
        return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]

    @cached_property
    def bracket2(self) -> np.ndarray:
        """Squared Japanese bracket 1 + |v|^2 at the nodes."""
        return 1.0 + self.radius2

    def cell_volume(self) -> float:
        return self.h ** 3


@dataclass(frozen=True)
class ScalarField:
    grid: VelocityGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.n,) * 3:
            raise ValueError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")


@dataclass(frozen=True)
class VectorField:
    grid: VelocityGrid
    values: np.ndarray  # shape (3, n, n, n)

    def __post_init__(self) -> None:
        if self.values.shape != (3,) + (self.grid.n,) * 3:
            raise ValueError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")


@dataclass(frozen=True)
class SymMatrixField:
    """Symmetric 3x3 matrix per node; component order xx, yy, zz, xy, xz, yz."""

    grid: VelocityGrid
    values: np.ndarray  # shape (6, n, n, n)

    def __post_init__(self) -> None:
        if self.values.shape != (6,) + (self.grid.n,) * 3:
            raise ValueError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")


def make_grid(n: int, l: float) -> VelocityGrid:
    """Build the cell-centered grid; n must be even and at least 8."""
    if n != int(n) or n % 2 != 0:
        raise ValueError("n must be even")
    n = int(n)
    if n < 8:
        raise ValueError("n must be at least 8")
    if not l > 0:
        raise ValueError("l must be positive")
    return VelocityGrid(n=n, l=float(l), h=2.0 * float(l) / n)


def weight_field(grid: VelocityGrid, m: float) -> ScalarField:
    """Node values of <v>^m with <v> = (1 + |v|^2)^(1/2)."""
    m = float(m)
    if abs(m) > 40.0:
        # log-space evaluation avoids overflow for the large exponents
        vals = np.exp(0.5 * m * np.log1p(grid.radius2))
    else:
        vals = grid.bracket2 ** (0.5 * m)
    return ScalarField(grid, vals)


def integrate(field: ScalarField) -> float:
    """Midpoint quadrature h^3 sum over all nodes."""
    return float(field.grid.cell_volume() * np.sum(field.values))


def weighted_lp_norm(f: ScalarField, p: float, m: float) -> float:
    """(integral of <v>^m f^p)^(1/p); negative node values are clipped to 0."""
    global _negative_clip_events
    if p < 1.0:
        raise ValueError("p must be at least 1")
    vals = f.values
    if np.any(vals < 0.0):
        _negative_clip_events += 1
        vals = np.maximum(vals, 0.0)
    w = weight_field(f.grid, m).values
    total = f.grid.cell_volume() * np.sum(w * vals ** p)
    return float(total ** (1.0 / p))


def negative_clip_count() -> int:
    """Number of weighted_lp_norm calls that had to clip negative values."""
    return _negative_clip_events


def reset_negative_clip_count() -> None:
    global _negative_clip_events
    _negative_clip_events = 0


def gradient_values(grid: VelocityGrid, values: np.ndarray) -> np.ndarray:
    """Second-order central differences, one-sided second order at the boundary."""
    return np.stack(np.gradient(values, grid.h, edge_order=2))


def gradient(f: ScalarField) -> VectorField:
    return VectorField(f.grid, gradient_values(f.grid, f.values))


def _second_diff(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = v[2:] - 2.0 * v[1:-1] + v[:-2]
    # one-sided 4-point stencil, exact on cubics
    out[0] = 2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]
    out[-1] = 2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]
    return np.moveaxis(out, 0, axis) / (h * h)


def laplacian_values(grid: VelocityGrid, values: np.ndarray) -> np.ndarray:
    h = grid.h
    return (
        _second_diff(values, h, 0)
        + _second_diff(values, h, 1)
        + _second_diff(values, h, 2)
    )


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, laplacian_values(f.grid, f.values))


def level_set_split(f: ScalarField, level: float) -> tuple[ScalarField, ScalarField]:
    """Split f into excess (f - level)_+ and bulk min(f, level)."""
    if level < 0.0:
        raise ValueError("level must be nonnegative")
    excess = np.maximum(f.values - level, 0.0)
    bulk = np.minimum(f.values, level)
    return ScalarField(f.grid, excess), ScalarField(f.grid, bulk)
