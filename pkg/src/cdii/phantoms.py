"""Analytic phantoms, synthetic data generation, and noise injection.

Phantoms are ordered lists of primitives; later shapes overwrite earlier
ones where they overlap.  Synthetic interior data is produced on a fine
mesh and restricted to the reconstruction mesh by bilinear interpolation
(the two node sets are not nested in general).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .grid import Grid, ScalarField
from .objective import interior_data
from .pde import solve_forward


def boundary_x(x, y):
    """First boundary excitation, f(x, y) = x."""
    return x + 0.0 * y


def boundary_y(x, y):
    """Second boundary excitation, f(x, y) = y."""
    return y + 0.0 * x


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float
    value: float

    def contains(self, X, Y):
        return (X - self.cx) ** 2 + (Y - self.cy) ** 2 <= self.radius**2


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    semi_x: float
    semi_y: float
    value: float

    def contains(self, X, Y):
        return ((X - self.cx) / self.semi_x) ** 2 + ((Y - self.cy) / self.semi_y) ** 2 <= 1.0


@dataclass(frozen=True)
class Box:
    x0: float
    x1: float
    y0: float
    y1: float
    value: float

    def contains(self, X, Y):
        return (X >= self.x0) & (X <= self.x1) & (Y >= self.y0) & (Y <= self.y1)


@dataclass(frozen=True)
class BoxFrame:
    """Axis-aligned square annulus: the outer box minus the inner box."""

    outer: tuple[float, float, float, float]
    inner: tuple[float, float, float, float]
    value: float

    def contains(self, X, Y):
        ox0, ox1, oy0, oy1 = self.outer
        ix0, ix1, iy0, iy1 = self.inner
        in_outer = (X >= ox0) & (X <= ox1) & (Y >= oy0) & (Y <= oy1)
        in_inner = (X > ix0) & (X < ix1) & (Y > iy0) & (Y < iy1)
        return in_outer & ~in_inner


@dataclass(frozen=True)
class Cardioid:
    """Polar curve r = scale * (1 - cos(phi - angle)) about (cx, cy)."""

    cx: float
    cy: float
    scale: float
    angle: float
    value: float

    def contains(self, X, Y):
        dx, dy = X - self.cx, Y - self.cy
        rho = np.hypot(dx, dy)
        phi = np.arctan2(dy, dx)
        return rho <= self.scale * (1.0 - np.cos(phi - self.angle))


Shape = Disk | Ellipse | Box | BoxFrame | Cardioid


@dataclass(frozen=True)
class Phantom:
    shapes: tuple[Shape, ...]
    background: float = 0.0


@dataclass(frozen=True)
class NoiseSpec:
    level: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("noise level must be >= 0")


_ANNULUS_OUTER = (-0.8, -0.1, -0.8, -0.1)
_ANNULUS_INNER = (-0.7, -0.2, -0.7, -0.2)


def test_case(number: int) -> Phantom:
    """The four ground-truth log-conductivity patterns used in the experiments."""
    if number == 1:
        return Phantom((Disk(0.25, 0.25, 0.25, 1.0),))
    if number == 2:
        return Phantom(
            (
                Ellipse(-0.4, 0.2, 0.22, 0.42, 1.0),
                Ellipse(0.4, 0.2, 0.22, 0.42, 1.0),
                Disk(0.0, -0.25, 0.22, 0.5),
            )
        )
    if number == 3:
        return Phantom(
            (
                BoxFrame(_ANNULUS_OUTER, _ANNULUS_INNER, 3.0),
                Box(*_ANNULUS_INNER, -2.0),
                Disk(0.7, 0.7, 0.2, 1.0),
                Disk(0.55, 0.55, 0.15, 2.0),
            )
        )
    if number == 4:
        return Phantom(
            (
                BoxFrame(_ANNULUS_OUTER, _ANNULUS_INNER, 3.0),
                Box(*_ANNULUS_INNER, -1.5),
                Disk(0.7, 0.7, 0.2, 1.0),
                Disk(0.55, 0.55, 0.15, 2.0),
                Disk(0.0, 0.0, 0.25, 1.5),
                Disk(0.05, 0.6, 0.2, 2.5),
                Cardioid(-0.6, 0.6, 0.15, 0.0, 4.0),
                Cardioid(-0.25, 0.8, 0.07, math.pi / 2, 3.0),
            )
        )
    raise ValueError(f"unknown test case {number}; expected 1..4")


def rasterize(phantom: Phantom, grid: Grid) -> ScalarField:
    """Nodal sigma field: last shape containing the node wins, else background."""
    X, Y = grid.meshgrid()
    out = np.full(X.shape, float(phantom.background))
    for shape in phantom.shapes:
        mask = shape.contains(X, Y)
        out[mask] = shape.value
    return ScalarField(grid, out)


def restrict(field: ScalarField, coarse: Grid) -> ScalarField:
    """Bilinear restriction from the field's grid to a coarser grid."""
    c = field.grid.coords()
    interp = RegularGridInterpolator((c, c), field.mat, method="linear")
    Xc, Yc = coarse.meshgrid()
    pts = np.stack([Yc.reshape(-1), Xc.reshape(-1)], axis=1)  # (y, x) index order
    return ScalarField(coarse, interp(pts))


def _max_workers() -> int:
    try:
        return max(1, int(os.environ.get("CDII_THREADS", "2")))
    except ValueError:
        return 1


def generate_data(
    phantom: Phantom,
    f_dirichlet: Callable,
    n_fine: int = 400,
    n_coarse: int = 150,
    domain: tuple[float, float] = (-1.0, 1.0),
) -> ScalarField:
    """Interior data for one excitation: fine-mesh solve restricted to the coarse mesh."""
    if n_fine <= n_coarse:
        raise ValueError("n_fine must exceed n_coarse")
    fine = Grid(n_fine, *domain)
    sigma = rasterize(phantom, fine)
    u = solve_forward(sigma, f_dirichlet)
    return restrict(interior_data(sigma, u), Grid(n_coarse, *domain))


def generate_data_pair(
    phantom: Phantom,
    n_fine: int = 400,
    n_coarse: int = 150,
    domain: tuple[float, float] = (-1.0, 1.0),
) -> tuple[ScalarField, ScalarField]:
    """Interior data for both standard excitations, solved concurrently.

    The CDII_THREADS environment variable caps the worker count.
    """
    workers = _max_workers()
    if workers < 2:
        return (
            generate_data(phantom, boundary_x, n_fine, n_coarse, domain),
            generate_data(phantom, boundary_y, n_fine, n_coarse, domain),
        )
    with ThreadPoolExecutor(max_workers=2) as pool:
        fut1 = pool.submit(generate_data, phantom, boundary_x, n_fine, n_coarse, domain)
        fut2 = pool.submit(generate_data, phantom, boundary_y, n_fine, n_coarse, domain)
        return fut1.result(), fut2.result()


def add_noise(h: ScalarField, spec: NoiseSpec) -> ScalarField:
    """Multiplicative Gaussian noise H * (1 + level * xi), seeded and deterministic."""
    if spec.level == 0.0:
        return h
    rng = np.random.default_rng(spec.seed)
    xi = rng.standard_normal(h.values.shape)
    return ScalarField(h.grid, h.values * (1.0 + spec.level * xi))
