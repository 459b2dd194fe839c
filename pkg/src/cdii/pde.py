"""Cell-nodal finite differences for the conductivity equation.

The conductivity coefficient is e^sigma with sigma the nodal
log-conductivity.  The 5-point stencil uses face coefficients
exp((sigma_p + sigma_q)/2) on each cell face between neighbouring nodes;
Dirichlet data is eliminated into the right-hand side.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError
from .grid import Grid, ScalarField, VectorField, quad_weights

# Relative residual required of every linear solve.
SOLVER_TOL = 1e-10
# Floor on |grad u| when dividing by it (sgn regularization).
EPS_GRAD = 1e-10


@dataclass(frozen=True)
class LinearSystem:
    """Assembled interior system A u = b, dimension (N-1)^2."""

    grid: Grid
    matrix: sp.csr_matrix
    rhs: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _face_coefficients(sigma: ScalarField) -> tuple[np.ndarray, np.ndarray]:
    """exp of face-averaged sigma: (cE, cN) with cE[j, i] on face (i,j)-(i+1,j)."""
    S = sigma.mat
    if not np.all(np.isfinite(S)):
        raise ValueError("sigma contains non-finite entries")
    cE = np.exp(0.5 * (S[:, 1:] + S[:, :-1]))
    cN = np.exp(0.5 * (S[1:, :] + S[:-1, :]))
    return cE, cN


def _interior_matrix(grid: Grid, cE: np.ndarray, cN: np.ndarray) -> sp.csr_matrix:
    N = grid.n_cells
    m = N - 1
    inv_h2 = 1.0 / grid.h**2

    diag = (cE[1:N, 1:N] + cE[1:N, 0 : N - 1] + cN[1:N, 1:N] + cN[0 : N - 1, 1:N]).reshape(-1)

    idx = np.arange(m * m).reshape(m, m)  # [jj, ii]
    # east couplings (i, j) -- (i+1, j)
    r_e = idx[:, :-1].reshape(-1)
    c_e = idx[:, 1:].reshape(-1)
    v_e = -cE[1:N, 1 : N - 1].reshape(-1)
    # north couplings (i, j) -- (i, j+1)
    r_n = idx[:-1, :].reshape(-1)
    c_n = idx[1:, :].reshape(-1)
    v_n = -cN[1 : N - 1, 1:N].reshape(-1)

    rows = np.concatenate([np.arange(m * m), r_e, c_e, r_n, c_n])
    cols = np.concatenate([np.arange(m * m), c_e, r_e, c_n, r_n])
    vals = np.concatenate([diag, v_e, v_e, v_n, v_n]) * inv_h2
    return sp.coo_matrix((vals, (rows, cols)), shape=(m * m, m * m)).tocsr()


def _boundary_rhs(grid: Grid, cE: np.ndarray, cN: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Dirichlet contribution to the interior right-hand side."""
    N = grid.n_cells
    rhs = np.zeros((N - 1, N - 1))
    rhs[:, 0] += cE[1:N, 0] * B[1:N, 0]
    rhs[:, -1] += cE[1:N, N - 1] * B[1:N, N]
    rhs[0, :] += cN[0, 1:N] * B[0, 1:N]
    rhs[-1, :] += cN[N - 1, 1:N] * B[N, 1:N]
    return rhs.reshape(-1) / grid.h**2


def dirichlet_values(grid: Grid, f: Callable) -> np.ndarray:
    """Evaluate boundary data f(x, y) on the full node matrix."""
    X, Y = grid.meshgrid()
    B = np.asarray(f(X, Y), dtype=float)
    return np.broadcast_to(B, X.shape).copy()


def assemble_forward(sigma: ScalarField, f_dirichlet: Callable) -> LinearSystem:
    """Assemble the interior 5-point system for -div(e^sigma grad u) = 0."""
    cE, cN = _face_coefficients(sigma)
    A = _interior_matrix(sigma.grid, cE, cN)
    B = dirichlet_values(sigma.grid, f_dirichlet)
    return LinearSystem(sigma.grid, A, _boundary_rhs(sigma.grid, cE, cN, B))


class ConductivityOperator:
    """Factorized discretization of -div(e^sigma grad .) for one sigma.

    A single sparse LU factorization serves every forward and adjoint
    solve at this sigma.  Instances are immutable and safe to share
    across threads for read-only solves.
    """

    def __init__(self, sigma: ScalarField):
        self.grid = sigma.grid
        self.sigma = sigma
        self._cE, self._cN = _face_coefficients(sigma)
        self.matrix = _interior_matrix(self.grid, self._cE, self._cN)
        self._lu = spla.splu(self.matrix.tocsc())

    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        x = self._lu.solve(rhs)
        res = np.linalg.norm(self.matrix @ x - rhs)
        scale = max(np.linalg.norm(rhs), 1e-300)
        if not np.all(np.isfinite(x)) or res > SOLVER_TOL * scale:
            raise SolverError(
                f"linear solve residual {res / scale:.3e} exceeds {SOLVER_TOL:.1e}",
                residual=res / scale,
            )
        return x

    def solve_dirichlet(self, boundary: np.ndarray) -> ScalarField:
        """Solve with the given nodal boundary matrix (interior entries ignored)."""
        N = self.grid.n_cells
        rhs = _boundary_rhs(self.grid, self._cE, self._cN, boundary)
        u = boundary.copy()
        u[1:N, 1:N] = self._solve(rhs).reshape(N - 1, N - 1)
        return ScalarField(self.grid, u)

    def solve_zero_dirichlet(self, rhs_full: np.ndarray) -> ScalarField:
        """Solve with homogeneous Dirichlet data and the given nodal source."""
        N = self.grid.n_cells
        n = self.grid.n_nodes
        rhs = rhs_full.reshape(n, n)[1:N, 1:N].reshape(-1)
        v = np.zeros((n, n))
        v[1:N, 1:N] = self._solve(rhs).reshape(N - 1, N - 1)
        return ScalarField(self.grid, v)


def solve_forward(sigma: ScalarField, f_dirichlet: Callable) -> ScalarField:
    """Solve -div(e^sigma grad u) = 0 with u = f_dirichlet on the boundary."""
    op = ConductivityOperator(sigma)
    return op.solve_dirichlet(dirichlet_values(sigma.grid, f_dirichlet))


@lru_cache(maxsize=32)
def _gradient_ops(grid: Grid) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Sparse nodal gradient: central inside, first-order one-sided on edges."""
    n = grid.n_nodes
    h = grid.h
    D = sp.lil_matrix((n, n))
    D[0, 0], D[0, 1] = -1.0 / h, 1.0 / h
    D[n - 1, n - 2], D[n - 1, n - 1] = -1.0 / h, 1.0 / h
    for k in range(1, n - 1):
        D[k, k - 1] = -0.5 / h
        D[k, k + 1] = 0.5 / h
    D = D.tocsr()
    eye = sp.identity(n, format="csr")
    return sp.kron(eye, D, format="csr"), sp.kron(D, eye, format="csr")


def gradient_field(u: ScalarField) -> VectorField:
    """Nodal gradient of u."""
    Gx, Gy = _gradient_ops(u.grid)
    return VectorField(u.grid, Gx @ u.values, Gy @ u.values)


def cell_averaged_rhs(flux: VectorField) -> ScalarField:
    """Cell-averaged divergence of a nodal flux.

    Face values are taken as averages of the two adjacent nodes, so the
    result is the central-difference divergence at interior nodes and
    zero on the boundary.  Exact for fluxes with quadratic components.
    """
    Fx, Fy = flux.mats
    if not (np.all(np.isfinite(Fx)) and np.all(np.isfinite(Fy))):
        raise ValueError("flux contains non-finite entries")
    h = flux.grid.h
    out = np.zeros_like(Fx)
    out[1:-1, 1:-1] = (Fx[1:-1, 2:] - Fx[1:-1, :-2] + Fy[2:, 1:-1] - Fy[:-2, 1:-1]) / (2.0 * h)
    return ScalarField(flux.grid, out)


def misfit_flux(
    sigma: ScalarField, u: ScalarField, g_delta: ScalarField, alpha: float
) -> tuple[VectorField, np.ndarray]:
    """Adjoint source flux alpha e^sigma (e^sigma |grad u| - g) sgn(grad u).

    Returns the nodal flux and the data misfit e^sigma |grad u| - g.
    sgn is regularized as grad u / max(|grad u|, EPS_GRAD).
    """
    du = gradient_field(u)
    mag = du.magnitude()
    esig = np.exp(sigma.values)
    misfit = esig * mag - g_delta.values
    safe = np.maximum(mag, EPS_GRAD)
    scale = alpha * esig * misfit / safe
    return VectorField(u.grid, scale * du.x_comp, scale * du.y_comp), misfit


def solve_adjoint(
    sigma: ScalarField,
    u: ScalarField,
    g_delta: ScalarField,
    alpha: float,
    operator: ConductivityOperator | None = None,
) -> ScalarField:
    """Solve the adjoint equation -div(e^sigma grad v) = div(F), v = 0 on the boundary.

    F is the misfit flux of ``misfit_flux``.  The divergence source is the
    quadrature-weighted transpose of the nodal gradient operator, which
    coincides with the cell-averaged face divergence away from the
    boundary and makes the reduced gradient the exact discrete adjoint of
    the discrete objective.
    """
    if operator is None:
        operator = ConductivityOperator(sigma)
    flux, _ = misfit_flux(sigma, u, g_delta, alpha)
    Gx, Gy = _gradient_ops(u.grid)
    w = quad_weights(u.grid)
    rhs = -(Gx.T @ (w * flux.x_comp) + Gy.T @ (w * flux.y_comp)) / u.grid.h**2
    return operator.solve_zero_dirichlet(rhs)
