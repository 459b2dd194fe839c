"""Variable inertial proximal (VIP) reconstruction.

Proximal gradient iteration with a fixed inertial term, a backtracked
Lipschitz estimate, H1-denoised gradient steps, projected soft
thresholding onto the box constraints, and a pointwise complementarity
residual as the stopping diagnostic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import LineSearchError
from .grid import ScalarField, quad_weights, weighted_norm
from .objective import (
    BoxBounds,
    InverseProblem,
    Weights,
    h1_smooth,
    l1_objective,
    objective_gradient,
    objective_value,
)


@dataclass(frozen=True)
class VipConfig:
    """All optimizer parameters, with the defaults used in the experiments."""

    theta: float = 0.5
    c1: float = 1.9
    c2: float = 0.001
    n_backtrack: float = 2.0
    L0: float = 1.0
    tol: float = 1e-4
    max_iter: int = 20
    k_param: float = 1.0
    backtrack_cap: int = 60
    weights: Weights = field(default_factory=Weights)
    bounds: BoxBounds = field(default_factory=BoxBounds)

    def validate(self) -> None:
        """Enforce the convergence-range constraints (CLI path).

        Out-of-range values such as theta >= 1 are still accepted by the
        solver itself so the divergence regime can be studied.
        """
        if not 0.0 <= self.theta < 1.0:
            raise ValueError(f"theta must be in [0, 1), got {self.theta}")
        if not 0.0 < self.c1 < 2.0:
            raise ValueError(f"c1 must be in (0, 2), got {self.c1}")
        if self.c2 <= 0:
            raise ValueError(f"c2 must be > 0, got {self.c2}")
        if self.n_backtrack <= 1:
            raise ValueError(f"n_backtrack must be > 1, got {self.n_backtrack}")
        if self.L0 <= 0:
            raise ValueError(f"L0 must be > 0, got {self.L0}")
        if self.tol <= 0 or self.max_iter < 1 or self.k_param <= 0:
            raise ValueError("tol, max_iter and k_param must be positive")


@dataclass(frozen=True)
class MultiplierTriple:
    lam: ScalarField
    lam_lower: ScalarField
    lam_upper: ScalarField


def soft_threshold(v: ScalarField, tau: float, bounds: BoxBounds) -> ScalarField:
    """Projected soft thresholding onto [sigma_l, sigma_u]."""
    if tau < 0:
        raise ValueError("threshold must be >= 0")
    x = v.values
    out = np.where(
        x > tau,
        np.minimum(x - tau, bounds.sigma_u),
        np.where(x < -tau, np.maximum(x + tau, bounds.sigma_l), 0.0),
    )
    return ScalarField(v.grid, out)


def multipliers(mu: ScalarField, gamma: float) -> MultiplierTriple:
    """Multiplier triple associated with the combined multiplier mu."""
    m = mu.values
    lam = np.minimum(gamma, np.maximum(0.0, m))
    lam_l = -np.minimum(0.0, m + gamma)
    lam_u = np.maximum(0.0, m - gamma)
    g = mu.grid
    return MultiplierTriple(ScalarField(g, lam), ScalarField(g, lam_l), ScalarField(g, lam_u))


def complementarity_residual(
    sigma: ScalarField,
    mu: ScalarField,
    gamma: float,
    k_param: float = 1.0,
    bounds: BoxBounds = BoxBounds(),
) -> ScalarField:
    """Pointwise residual that vanishes exactly at KKT stationary pairs."""
    if k_param <= 0:
        raise ValueError("k_param must be > 0")
    s, m, k = sigma.values, mu.values, k_param
    e = (
        s
        - np.maximum(0.0, s + k * (m - gamma))
        + np.maximum(0.0, s - bounds.sigma_u + k * (m - gamma))
        - np.minimum(0.0, s + k * (m + gamma))
        + np.minimum(0.0, s - bounds.sigma_l + k * (m + gamma))
    )
    return ScalarField(sigma.grid, e)


@dataclass
class BacktrackResult:
    L: float
    step: float
    sigma_trial: ScalarField
    j1_trial: float
    majorization_lhs: float
    majorization_rhs: float
    n_trials: int


def backtrack(
    j1_fun,
    sigma: ScalarField,
    sigma_prev: ScalarField,
    grad: ScalarField,
    grad_smooth: ScalarField,
    j1_value: float,
    L_prev: float,
    cfg: VipConfig,
) -> BacktrackResult:
    """Find the smallest doubling of L whose proximal step is majorized.

    The majorization test uses the raw gradient while the trial point is
    thresholded from the denoised gradient step, exactly as the update
    itself.  The accepted step satisfies the quadratic upper bound with a
    1e-12 relative slack, re-checkable post hoc.
    """
    qw = quad_weights(sigma.grid)
    inertia = cfg.theta * (sigma.values - sigma_prev.values)
    for i in range(cfg.backtrack_cap + 1):
        L = cfg.n_backtrack**i * L_prev
        s = cfg.c1 * (1.0 - cfg.theta) / (L + 2.0 * cfg.c2)
        # theta >= 1 makes s negative; the prox threshold is then inactive
        tau = max(cfg.weights.gamma * s, 0.0)
        trial = soft_threshold(
            ScalarField(sigma.grid, sigma.values - s * grad_smooth.values + inertia),
            tau,
            cfg.bounds,
        )
        d = trial.values - sigma.values
        lhs = j1_fun(trial)
        rhs = j1_value + float(np.sum(qw * grad.values * d)) + 0.5 * L * float(np.sum(qw * d * d))
        if lhs <= rhs + 1e-12 * abs(rhs):
            return BacktrackResult(L, s, trial, lhs, lhs, rhs, i + 1)
    raise LineSearchError(
        f"no majorizing L within {cfg.backtrack_cap} doublings (L reached {L:.3e})"
    )


@dataclass
class IterationRecord:
    k: int
    j1: float
    j2: float
    e_norm: float
    L: float | None = None
    step: float | None = None
    majorization_lhs: float | None = None
    majorization_rhs: float | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class VipResult:
    sigma: ScalarField
    history: list[IterationRecord]
    n_iter: int
    converged: bool
    wall_time: float
    # mu in the residual reads the L2 weight as the multiplier scale;
    # the algorithm statement leaves that symbol ambiguous.
    mu_uses_l2_weight: bool = True


def vip_run(
    problem: InverseProblem,
    config: VipConfig,
    sigma0: ScalarField | None = None,
) -> VipResult:
    """Run the full inertial proximal loop and record every iteration."""
    if sigma0 is None:
        sigma0 = ScalarField.zeros(problem.grid)
    if np.any(sigma0.values < config.bounds.sigma_l) or np.any(
        sigma0.values > config.bounds.sigma_u
    ):
        raise ValueError("initial guess violates the box bounds")
    w = config.weights
    t0 = time.perf_counter()

    sigma = sigma0
    sigma_prev = sigma0
    L = config.L0
    history: list[IterationRecord] = []
    converged = False

    def j1_fun(s: ScalarField) -> float:
        return objective_value(problem, w, s)

    for k in range(config.max_iter + 1):
        grad, j1_k = objective_gradient(problem, w, sigma)
        grad_smooth = h1_smooth(grad, w.c_denoise)
        mu = ScalarField(problem.grid, -w.beta * sigma.values - grad_smooth.values)
        e_k = complementarity_residual(sigma, mu, w.gamma, config.k_param, config.bounds)
        rec = IterationRecord(k, j1_k, l1_objective(sigma, w), weighted_norm(e_k))
        history.append(rec)
        if rec.e_norm <= config.tol:
            converged = True
            break
        if k == config.max_iter:
            break
        bt = backtrack(j1_fun, sigma, sigma_prev, grad, grad_smooth, j1_k, L, config)
        rec.L, rec.step = bt.L, bt.step
        rec.majorization_lhs, rec.majorization_rhs = bt.majorization_lhs, bt.majorization_rhs
        L = bt.L
        sigma_prev, sigma = sigma, bt.sigma_trial

    return VipResult(
        sigma=sigma,
        history=history,
        n_iter=history[-1].k,
        converged=converged,
        wall_time=time.perf_counter() - t0,
    )
