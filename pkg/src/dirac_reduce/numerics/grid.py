"""Uniform tensor grids."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

MIN_POINTS = 8


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int
    axis: str = "x"

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ParameterError(f"grid needs x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise ParameterError(f"grid needs an integer n_points >= {MIN_POINTS}, got {self.n_points}")
        if self.axis not in ("x", "y", "t"):
            raise ParameterError(f"unknown axis name {self.axis!r}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def symmetric(cls, half_width, n_points, axis="x"):
        return cls(-float(half_width), float(half_width), n_points, axis)

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    h = spacing

    @property
    def points(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def shape(self):
        return (self.n_points,)

    @property
    def axes(self):
        return (self,)

    def refined(self, factor=2):
        """Same interval with the spacing divided by ``factor``."""
        return Grid1D(self.x_min, self.x_max, (self.n_points - 1) * factor + 1, self.axis)

    def mesh(self):
        return {self.axis: self.points}

    def coords(self):
        return coords_from_mesh(self.mesh(), self.shape)


@dataclass(frozen=True)
class _TensorGrid:
    first: Grid1D
    second: Grid1D

    @property
    def axes(self):
        return (self.first, self.second)

    @property
    def shape(self):
        return (self.first.n_points, self.second.n_points)

    def mesh(self):
        a, b = np.meshgrid(self.first.points, self.second.points, indexing="ij")
        return {self.first.axis: a, self.second.axis: b}

    def coords(self):
        return coords_from_mesh(self.mesh(), self.shape)

    def refined(self, factor=2):
        return type(self)(self.first.refined(factor), self.second.refined(factor))


class Grid2D(_TensorGrid):
    """Tensor grid over ``(x, y)``; arrays are indexed ``[ix, iy]``."""

    def __init__(self, x, y):
        if x.axis != "x" or y.axis != "y":
            x = Grid1D(x.x_min, x.x_max, x.n_points, "x")
            y = Grid1D(y.x_min, y.x_max, y.n_points, "y")
        super().__init__(x, y)

    @property
    def x(self):
        return self.first

    @property
    def y(self):
        return self.second


class GridTX(_TensorGrid):
    """Tensor grid over ``(t, x)``; arrays are indexed ``[it, ix]``."""

    def __init__(self, t, x):
        if t.axis != "t" or x.axis != "x":
            t = Grid1D(t.x_min, t.x_max, t.n_points, "t")
            x = Grid1D(x.x_min, x.x_max, x.n_points, "x")
        super().__init__(t, x)

    @property
    def t(self):
        return self.first

    @property
    def x(self):
        return self.second


def coords_from_mesh(mesh, shape):
    zero = np.zeros(shape)
    return tuple(mesh.get(name, zero) for name in ("x", "y", "t"))


def axis_index(grid, name):
    for k, ax in enumerate(grid.axes):
        if ax.axis == name:
            return k
    return None
