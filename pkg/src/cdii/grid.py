"""Uniform grid and nodal field containers.

All fields live on the nodes of a uniform (N+1) x (N+1) grid over the
square [a, b]^2.  Nodal values are stored flat in row-major order with x
fastest: node (i, j) maps to index j*(N+1) + i, so ``values.reshape(n, n)``
yields a matrix indexed ``[j, i]`` (y row, x column).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform nodal grid with ``n_cells`` cells per direction on [a, b]^2."""

    n_cells: int
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self) -> None:
        if self.n_cells < 2:
            raise ValueError(f"n_cells must be >= 2, got {self.n_cells}")
        if not self.b > self.a:
            raise ValueError(f"domain bounds must satisfy a < b, got [{self.a}, {self.b}]")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def n_nodes(self) -> int:
        """Nodes per direction, N + 1."""
        return self.n_cells + 1

    @property
    def size(self) -> int:
        """Total node count, (N + 1)^2."""
        return self.n_nodes * self.n_nodes

    def coords(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n_nodes)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinate matrices (X, Y), each indexed [j, i]."""
        c = self.coords()
        return np.meshgrid(c, c, indexing="xy")


@lru_cache(maxsize=32)
def quad_weights(grid: Grid) -> np.ndarray:
    """Trapezoid quadrature weights per node, flat, summing to (b - a)^2.

    Interior nodes weigh h^2, edge nodes h^2/2, corners h^2/4.
    """
    n = grid.n_nodes
    c = np.ones(n)
    c[0] = c[-1] = 0.5
    w = grid.h**2 * np.outer(c, c)
    w.setflags(write=False)
    return w.reshape(-1)


@lru_cache(maxsize=32)
def boundary_mask(grid: Grid) -> np.ndarray:
    """Boolean matrix, True on boundary nodes."""
    n = grid.n_nodes
    m = np.zeros((n, n), dtype=bool)
    m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
    m.setflags(write=False)
    return m


def _as_flat(grid: Grid, values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape == (grid.n_nodes, grid.n_nodes):
        arr = arr.reshape(-1)
    if arr.shape != (grid.size,):
        raise ValueError(
            f"expected {grid.size} nodal values for N={grid.n_cells}, got shape {arr.shape}"
        )
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField:
    """Nodal values of a scalar quantity on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_flat(self.grid, self.values))

    @property
    def mat(self) -> np.ndarray:
        """(N+1, N+1) view indexed [j, i]."""
        n = self.grid.n_nodes
        return self.values.reshape(n, n)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.size, float(value)))

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls.constant(grid, 0.0)

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable) -> "ScalarField":
        X, Y = grid.meshgrid()
        return cls(grid, np.broadcast_to(np.asarray(fn(X, Y), dtype=float), X.shape))


@dataclass(frozen=True)
class VectorField:
    """Nodal values of a 2-vector quantity on a grid."""

    grid: Grid
    x_comp: np.ndarray
    y_comp: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_comp", _as_flat(self.grid, self.x_comp))
        object.__setattr__(self, "y_comp", _as_flat(self.grid, self.y_comp))

    @property
    def mats(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.grid.n_nodes
        return self.x_comp.reshape(n, n), self.y_comp.reshape(n, n)

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.x_comp, self.y_comp)


def weighted_norm(field: ScalarField) -> float:
    """Discrete L2 norm with trapezoid quadrature weights."""
    w = quad_weights(field.grid)
    return float(np.sqrt(np.sum(w * field.values**2)))


def weighted_inner(u: ScalarField, v: ScalarField) -> float:
    if u.grid != v.grid:
        raise ValueError("fields live on different grids")
    w = quad_weights(u.grid)
    return float(np.sum(w * u.values * v.values))
