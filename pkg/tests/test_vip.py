"""Proximal operator, multipliers, backtracking, and optimizer loop tests."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cdii import Grid, ScalarField, VipConfig, Weights, soft_threshold, vip_run
from cdii.errors import LineSearchError
from cdii.grid import quad_weights
from cdii.objective import BoxBounds
from cdii.vip import backtrack, complementarity_residual, multipliers

GRID = Grid(4)
BOUNDS = BoxBounds(-4.0, 4.0)

finite_vals = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
field_arrays = arrays(np.float64, GRID.size, elements=finite_vals)


def const(x: float) -> ScalarField:
    return ScalarField.constant(GRID, x)


def test_soft_threshold_branch_examples():
    assert np.all(soft_threshold(const(0.0), 0.7, BOUNDS).values == 0.0)
    assert np.allclose(soft_threshold(const(0.5), 0.2, BOUNDS).values, 0.3)
    assert np.allclose(soft_threshold(const(-0.5), 0.2, BOUNDS).values, -0.3)
    assert np.allclose(soft_threshold(const(10.0), 0.2, BOUNDS).values, 4.0)
    assert np.allclose(soft_threshold(const(-10.0), 0.2, BOUNDS).values, -4.0)
    with pytest.raises(ValueError):
        soft_threshold(const(1.0), -0.1, BOUNDS)


@settings(max_examples=50, deadline=None)
@given(field_arrays, field_arrays, st.floats(min_value=0.0, max_value=5.0))
def test_soft_threshold_nonexpansive_max_norm(v, w, tau):
    sv = soft_threshold(ScalarField(GRID, v), tau, BOUNDS).values
    sw = soft_threshold(ScalarField(GRID, w), tau, BOUNDS).values
    assert np.max(np.abs(sv - sw)) <= np.max(np.abs(v - w)) + 1e-12


@settings(max_examples=50, deadline=None)
@given(field_arrays)
def test_soft_threshold_zero_tau_wide_bounds_identity(v):
    wide = BoxBounds(-1e6, 1e6)
    out = soft_threshold(ScalarField(GRID, v), 0.0, wide).values
    assert np.array_equal(out, v)


@settings(max_examples=50, deadline=None)
@given(field_arrays, st.floats(min_value=0.0, max_value=5.0))
def test_soft_threshold_respects_bounds(v, tau):
    out = soft_threshold(ScalarField(GRID, v), tau, BOUNDS).values
    assert np.all(out >= BOUNDS.sigma_l) and np.all(out <= BOUNDS.sigma_u)


def test_multipliers_clamping_examples():
    gamma = 0.3
    for mu, expected in (
        (0.0, (0.0, 0.0, 0.0)),
        (2.0 * gamma, (gamma, 0.0, gamma)),
        (-2.0 * gamma, (0.0, gamma, 0.0)),
    ):
        triple = multipliers(const(mu), gamma)
        assert np.allclose(triple.lam.values, expected[0])
        assert np.allclose(triple.lam_lower.values, expected[1])
        assert np.allclose(triple.lam_upper.values, expected[2])


@settings(max_examples=50, deadline=None)
@given(field_arrays, st.floats(min_value=1e-3, max_value=2.0))
def test_multipliers_range_invariants(mu, gamma):
    triple = multipliers(ScalarField(GRID, mu), gamma)
    assert np.all(triple.lam.values >= 0.0) and np.all(triple.lam.values <= gamma)
    assert np.all(triple.lam_lower.values >= 0.0)
    assert np.all(triple.lam_upper.values >= 0.0)


def test_complementarity_scalar_examples():
    gamma = 0.3
    cases = ((0.0, 0.1, 0.0), (0.5, 0.3, 0.0), (0.5, 0.1, 0.2))
    for s, m, expected in cases:
        e = complementarity_residual(const(s), const(m), gamma, 1.0, BOUNDS)
        assert np.allclose(e.values, expected, atol=1e-15)
    with pytest.raises(ValueError):
        complementarity_residual(const(0.0), const(0.0), gamma, 0.0, BOUNDS)


def _quadratic_backtrack(L0: float):
    """Backtrack on the quadratic j(sigma) = (1/2)||sigma||^2 (unit Lipschitz)."""
    grid = Grid(6)
    qw = quad_weights(grid)
    sigma = ScalarField(grid, np.random.default_rng(3).normal(size=grid.size))

    def j1(s: ScalarField) -> float:
        return 0.5 * float(np.sum(qw * s.values**2))

    cfg = VipConfig(theta=0.0, L0=L0, weights=Weights(gamma=0.0), bounds=BoxBounds(-1e9, 1e9))
    return backtrack(j1, sigma, sigma, sigma, sigma, j1(sigma), L0, cfg)


def test_backtrack_quadratic_accepts_at_unit_lipschitz():
    assert _quadratic_backtrack(1.0).n_trials == 1
    assert _quadratic_backtrack(1.0).L == 1.0


def test_backtrack_quadratic_doubles_up_from_quarter():
    res = _quadratic_backtrack(0.25)
    assert res.n_trials == 3  # L = 0.25, 0.5 rejected; L = 1 accepted
    assert res.L == 1.0


def test_backtrack_exhaustion_raises():
    grid = Grid(4)
    sigma = ScalarField.constant(grid, 1.0)

    def hopeless(_s: ScalarField) -> float:
        return np.inf

    cfg = VipConfig(theta=0.0, backtrack_cap=5)
    with pytest.raises(LineSearchError):
        backtrack(hopeless, sigma, sigma, sigma, sigma, 0.0, 1.0, cfg)


def test_vip_fixed_point_at_zero(perfect_zero_problem):
    result = vip_run(perfect_zero_problem, VipConfig())
    assert result.converged
    assert result.n_iter == 0
    assert np.all(result.sigma.values == 0.0)
    assert result.history[0].e_norm <= 1e-4


def test_vip_rejects_out_of_bounds_start(perfect_zero_problem):
    grid = perfect_zero_problem.grid
    bad = ScalarField.constant(grid, 10.0)
    with pytest.raises(ValueError):
        vip_run(perfect_zero_problem, VipConfig(), sigma0=bad)


def test_vip_iterates_stay_in_bounds(tc1_n40):
    problem, _ = tc1_n40
    bounds = BoxBounds(-0.2, 0.2)  # tight enough to activate the projection
    result = vip_run(problem, VipConfig(max_iter=4, bounds=bounds))
    assert np.all(result.sigma.values >= bounds.sigma_l - 1e-15)
    assert np.all(result.sigma.values <= bounds.sigma_u + 1e-15)
    assert len(result.history) == result.n_iter + 1


def test_vip_config_validation():
    VipConfig().validate()
    for bad in (
        VipConfig(theta=1.5),
        VipConfig(theta=-0.1),
        VipConfig(c1=2.5),
        VipConfig(c2=0.0),
        VipConfig(n_backtrack=1.0),
        VipConfig(L0=0.0),
        VipConfig(tol=0.0),
    ):
        with pytest.raises(ValueError):
            bad.validate()
