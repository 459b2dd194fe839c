"""Cost functional, edge-preserving regularizer, and reduced gradient.

The smooth part of the objective couples two data-fit terms with an L2
penalty and a Perona-Malik edge-preserving term; the non-smooth part is a
weighted L1 norm handled by the proximal step in the optimizer.  The
reduced gradient returned here is the exact discrete adjoint gradient of
the discrete smooth objective with respect to the trapezoid-weighted
inner product, so it matches finite differences of the objective to
round-off.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import Grid, ScalarField, quad_weights
from .pde import ConductivityOperator, dirichlet_values, gradient_field, solve_adjoint


@dataclass(frozen=True)
class Weights:
    """Objective weights: data fits, L2, L1, Perona-Malik, and H1 denoising."""

    alpha1: float = 1.0
    alpha2: float = 1.0
    beta: float = 0.03
    gamma: float = 0.3
    delta: float = 0.01
    c_denoise: float = 0.001

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2", "beta", "gamma", "delta", "c_denoise"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class BoxBounds:
    """Pointwise log-conductivity bounds; must bracket the zero background."""

    sigma_l: float = -4.0
    sigma_u: float = 4.0

    def __post_init__(self) -> None:
        if not self.sigma_l < 0.0 < self.sigma_u:
            raise ValueError("bounds must satisfy sigma_l < 0 < sigma_u")


@dataclass(frozen=True)
class InverseProblem:
    """Measured interior data and the boundary excitations that produced it."""

    grid: Grid
    g1: ScalarField
    g2: ScalarField
    f1: Callable = field(default=lambda x, y: x)
    f2: Callable = field(default=lambda x, y: y)


def interior_data(sigma: ScalarField, u: ScalarField) -> ScalarField:
    """Interior electric field magnitude e^sigma |grad u|."""
    if sigma.grid != u.grid:
        raise ValueError("sigma and u live on different grids")
    return ScalarField(u.grid, np.exp(sigma.values) * gradient_field(u).magnitude())


def _face_weights(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature weights per face (x-faces (n, N), y-faces (N, n))."""
    n = grid.n_nodes
    c = np.ones(n)
    c[0] = c[-1] = 0.5
    wx = grid.h**2 * np.tile(c[:, None], (1, n - 1))
    wy = grid.h**2 * np.tile(c[None, :], (n - 1, 1))
    return wx, wy


def _face_slopes(sigma: ScalarField) -> tuple[np.ndarray, np.ndarray]:
    S = sigma.mat
    h = sigma.grid.h
    return (S[:, 1:] - S[:, :-1]) / h, (S[1:, :] - S[:-1, :]) / h


def perona_malik_energy(sigma: ScalarField) -> float:
    """Face quadrature of log(1 + |grad sigma|^2), split per direction.

    The split form makes ``perona_malik_divergence`` its exact derivative.
    """
    dx, dy = _face_slopes(sigma)
    wx, wy = _face_weights(sigma.grid)
    return float(np.sum(wx * np.log1p(dx**2)) + np.sum(wy * np.log1p(dy**2)))


def perona_malik_divergence(sigma: ScalarField) -> ScalarField:
    """div(a grad sigma) with a = 1/(1 + slope^2) on faces.

    Returned without the -delta factor; the caller applies it.  Satisfies
    d/dsigma [1/2 * perona_malik_energy] = -w .* result nodewise, w the
    trapezoid quadrature weights.
    """
    dx, dy = _face_slopes(sigma)
    wx, wy = _face_weights(sigma.grid)
    tx = wx * dx / (1.0 + dx**2)
    ty = wy * dy / (1.0 + dy**2)
    n = sigma.grid.n_nodes
    acc = np.zeros((n, n))
    acc[:, :-1] += tx
    acc[:, 1:] -= tx
    acc[:-1, :] += ty
    acc[1:, :] -= ty
    w = quad_weights(sigma.grid).reshape(n, n)
    return ScalarField(sigma.grid, acc / (w * sigma.grid.h))


def smooth_objective(
    sigma: ScalarField,
    u1: ScalarField,
    u2: ScalarField,
    g1: ScalarField,
    g2: ScalarField,
    w: Weights,
) -> float:
    """Data misfits plus L2 and Perona-Malik penalties (the smooth part)."""
    qw = quad_weights(sigma.grid)
    total = 0.0
    for alpha, u, g in ((w.alpha1, u1, g1), (w.alpha2, u2, g2)):
        m = interior_data(sigma, u).values - g.values
        total += 0.5 * alpha * float(np.sum(qw * m**2))
    total += 0.5 * w.beta * float(np.sum(qw * sigma.values**2))
    total += 0.5 * w.delta * perona_malik_energy(sigma)
    return total


def l1_objective(sigma: ScalarField, w: Weights) -> float:
    """gamma-weighted discrete L1 norm of sigma (the non-smooth part)."""
    qw = quad_weights(sigma.grid)
    return w.gamma * float(np.sum(qw * np.abs(sigma.values)))


def _face_coupling(sigma: ScalarField, u: ScalarField, v: ScalarField) -> np.ndarray:
    """Nodal field pairing e^sigma grad u . grad v through the stencil faces.

    This is the exact derivative of the discrete PDE constraint paired
    with the adjoint state; v must vanish on the boundary.
    """
    S, U, V = sigma.mat, u.mat, v.mat
    cE = np.exp(0.5 * (S[:, 1:] + S[:, :-1]))
    cN = np.exp(0.5 * (S[1:, :] + S[:-1, :]))
    tx = 0.5 * cE * (U[:, 1:] - U[:, :-1]) * (V[:, 1:] - V[:, :-1])
    ty = 0.5 * cN * (U[1:, :] - U[:-1, :]) * (V[1:, :] - V[:-1, :])
    n = sigma.grid.n_nodes
    acc = np.zeros((n, n))
    acc[:, :-1] += tx
    acc[:, 1:] += tx
    acc[:-1, :] += ty
    acc[1:, :] += ty
    w = quad_weights(sigma.grid).reshape(n, n)
    return (acc / w).reshape(-1)


def reduced_gradient(
    sigma: ScalarField,
    u1: ScalarField,
    u2: ScalarField,
    v1: ScalarField,
    v2: ScalarField,
    g1: ScalarField,
    g2: ScalarField,
    w: Weights,
) -> ScalarField:
    """Gradient of the smooth objective w.r.t. the weighted inner product."""
    esig = np.exp(sigma.values)
    grad = w.beta * sigma.values - w.delta * perona_malik_divergence(sigma).values
    for alpha, u, v, g in ((w.alpha1, u1, v1, g1), (w.alpha2, u2, v2, g2)):
        H = esig * gradient_field(u).magnitude()
        grad = grad + alpha * (H - g.values) * H
        grad = grad + _face_coupling(sigma, u, v)
    return ScalarField(sigma.grid, grad)


@lru_cache(maxsize=32)
def _denoise_factor(grid: Grid, c: float):
    """LU factors of I - c * Laplacian on interior nodes, Dirichlet b.c."""
    N = grid.n_cells
    m = N - 1
    inv_h2 = 1.0 / grid.h**2
    idx = np.arange(m * m).reshape(m, m)
    r_e, c_e = idx[:, :-1].reshape(-1), idx[:, 1:].reshape(-1)
    r_n, c_n = idx[:-1, :].reshape(-1), idx[1:, :].reshape(-1)
    rows = np.concatenate([np.arange(m * m), r_e, c_e, r_n, c_n])
    cols = np.concatenate([np.arange(m * m), c_e, r_e, c_n, r_n])
    vals = np.concatenate(
        [
            np.full(m * m, 1.0 + 4.0 * c * inv_h2),
            np.full(2 * r_e.size + 2 * r_n.size, -c * inv_h2),
        ]
    )
    A = sp.coo_matrix((vals, (rows, cols)), shape=(m * m, m * m)).tocsc()
    return spla.splu(A)


def h1_smooth(g: ScalarField, c: float) -> ScalarField:
    """Apply the denoising operator (I - c Laplacian)^{-1}, zero Dirichlet data.

    c = 0 returns g unchanged.
    """
    if c < 0:
        raise ValueError("denoising parameter must be >= 0")
    if c == 0.0:
        return g
    N = g.grid.n_cells
    lu = _denoise_factor(g.grid, float(c))
    out = np.zeros_like(g.mat)
    out[1:N, 1:N] = lu.solve(g.mat[1:N, 1:N].reshape(-1)).reshape(N - 1, N - 1)
    return ScalarField(g.grid, out)


def solve_states(
    problem: InverseProblem, w: Weights, sigma: ScalarField
) -> tuple[ConductivityOperator, ScalarField, ScalarField]:
    """Forward solves for both boundary excitations sharing one factorization."""
    op = ConductivityOperator(sigma)
    u1 = op.solve_dirichlet(dirichlet_values(sigma.grid, problem.f1))
    u2 = op.solve_dirichlet(dirichlet_values(sigma.grid, problem.f2))
    return op, u1, u2


def objective_value(problem: InverseProblem, w: Weights, sigma: ScalarField) -> float:
    """Smooth objective evaluated through fresh forward solves."""
    _, u1, u2 = solve_states(problem, w, sigma)
    return smooth_objective(sigma, u1, u2, problem.g1, problem.g2, w)


def objective_gradient(
    problem: InverseProblem, w: Weights, sigma: ScalarField
) -> tuple[ScalarField, float]:
    """Reduced gradient and objective value at sigma (4 solves, 1 factorization)."""
    op, u1, u2 = solve_states(problem, w, sigma)
    v1 = solve_adjoint(sigma, u1, problem.g1, w.alpha1, operator=op)
    v2 = solve_adjoint(sigma, u2, problem.g2, w.alpha2, operator=op)
    grad = reduced_gradient(sigma, u1, u2, v1, v2, problem.g1, problem.g2, w)
    val = smooth_objective(sigma, u1, u2, problem.g1, problem.g2, w)
    return grad, val
