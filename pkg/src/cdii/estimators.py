"""Scikit-learn style estimators wrapping the reconstruction algorithms.

X is the measured interior data for the two standard boundary
excitations f = x and f = y, stacked as an array of shape (2, n, n) with
n = N + 1 nodes per direction on the square (-1, 1)^2.  After ``fit`` the
reconstructed log-conductivity is available as ``sigma_``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .grid import Grid, ScalarField
from .objective import BoxBounds, InverseProblem, Weights
from .picard import PicardConfig, picard_run
from .report import relative_l2_error
from .vip import VipConfig, vip_run


def _validate_data(X) -> tuple[Grid, ScalarField, ScalarField]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 3 or X.shape[0] != 2 or X.shape[1] != X.shape[2]:
        raise ValueError(f"expected interior data of shape (2, n, n), got {X.shape}")
    if X.shape[1] < 3:
        raise ValueError("need at least a 2-cell grid")
    if not np.all(np.isfinite(X)):
        raise ValueError("interior data contains non-finite values")
    grid = Grid(X.shape[1] - 1)
    return grid, ScalarField(grid, X[0]), ScalarField(grid, X[1])


class _ReconstructionMixin:
    def _problem(self, X) -> InverseProblem:
        grid, g1, g2 = _validate_data(X)
        return InverseProblem(grid, g1, g2)

    def predict(self, X=None) -> np.ndarray:
        """Reconstructed log-conductivity as an (n, n) matrix."""
        self._check_fitted()
        return self.sigma_.mat.copy()

    def score(self, X, y) -> float:
        """Negative weighted relative L2 error against a ground truth field."""
        self._check_fitted()
        y = np.asarray(y, dtype=float)
        return -relative_l2_error(self.sigma_, ScalarField(self.sigma_.grid, y))

    def _check_fitted(self) -> None:
        if not hasattr(self, "sigma_"):
            raise RuntimeError("estimator is not fitted; call fit first")


class VipReconstruction(_ReconstructionMixin, BaseEstimator):
    """Sparse reconstruction by the variable inertial proximal scheme."""

    def __init__(
        self,
        alpha1: float = 1.0,
        alpha2: float = 1.0,
        beta: float = 0.03,
        gamma: float = 0.3,
        delta: float = 0.01,
        c_denoise: float = 0.001,
        theta: float = 0.5,
        c1: float = 1.9,
        c2: float = 0.001,
        n_backtrack: float = 2.0,
        L0: float = 1.0,
        tol: float = 1e-4,
        max_iter: int = 20,
        sigma_l: float = -4.0,
        sigma_u: float = 4.0,
    ):
        self.alpha1 = alpha1
        self.alpha2 = alpha2
        self.beta = beta
        self.gamma = gamma
        self.delta = delta
        self.c_denoise = c_denoise
        self.theta = theta
        self.c1 = c1
        self.c2 = c2
        self.n_backtrack = n_backtrack
        self.L0 = L0
        self.tol = tol
        self.max_iter = max_iter
        self.sigma_l = sigma_l
        self.sigma_u = sigma_u

    def fit(self, X, y=None):
        problem = self._problem(X)
        cfg = VipConfig(
            theta=self.theta,
            c1=self.c1,
            c2=self.c2,
            n_backtrack=self.n_backtrack,
            L0=self.L0,
            tol=self.tol,
            max_iter=self.max_iter,
            weights=Weights(
                self.alpha1, self.alpha2, self.beta, self.gamma, self.delta, self.c_denoise
            ),
            bounds=BoxBounds(self.sigma_l, self.sigma_u),
        )
        result = vip_run(problem, cfg)
        self.sigma_ = result.sigma
        self.history_ = [r.as_dict() for r in result.history]
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        return self


class PicardReconstruction(_ReconstructionMixin, BaseEstimator):
    """Substitution-iteration baseline; fit stores the log of the final iterate."""

    def __init__(
        self,
        max_iter: int = 20,
        tol: float = 1e-4,
        eps_grad: float = 1e-8,
        init_conductivity: float = 1.0,
    ):
        self.max_iter = max_iter
        self.tol = tol
        self.eps_grad = eps_grad
        self.init_conductivity = init_conductivity

    def fit(self, X, y=None):
        problem = self._problem(X)
        cfg = PicardConfig(self.max_iter, self.tol, self.eps_grad, self.init_conductivity)
        result = picard_run(problem, cfg)
        self.sigma_ = result.sigma
        self.history_ = [{"err": e} for e in result.err_history]
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        return self
