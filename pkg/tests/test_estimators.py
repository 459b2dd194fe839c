"""Estimator-interface tests."""
from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone

from cdii import Grid, PicardReconstruction, ScalarField, VipReconstruction


def _unit_data(n_cells=8) -> np.ndarray:
    """Exact data for sigma = 0: H1 = H2 = 1 on an (n+1)x(n+1) node grid."""
    n = n_cells + 1
    return np.ones((2, n, n))


def test_get_params_round_trip():
    est = VipReconstruction(gamma=0.5, max_iter=7)
    params = est.get_params()
    assert params["gamma"] == 0.5 and params["max_iter"] == 7
    twin = VipReconstruction(**params)
    assert twin.get_params() == params


def test_clone_preserves_params():
    est = PicardReconstruction(max_iter=3, eps_grad=1e-6)
    twin = clone(est)
    assert twin.get_params() == est.get_params()


@pytest.mark.parametrize("cls", [VipReconstruction, PicardReconstruction])
def test_fit_predict_score_on_exact_zero(cls):
    est = cls(max_iter=5)
    est.fit(_unit_data())
    pred = est.predict()
    assert pred.shape == (9, 9)
    assert np.allclose(pred, 0.0, atol=1e-6)
    truth = np.zeros((9, 9))
    assert est.score(None, truth) == pytest.approx(0.0, abs=1e-6)
    assert est.n_iter_ >= 0 and isinstance(est.history_, list)


def test_unfitted_raises():
    est = VipReconstruction()
    with pytest.raises(RuntimeError):
        est.predict()


@pytest.mark.parametrize(
    "bad",
    [np.ones((3, 5, 5)), np.ones((2, 5, 4)), np.ones((2, 2, 2)), np.full((2, 5, 5), np.nan)],
)
def test_fit_rejects_malformed_data(bad):
    with pytest.raises(ValueError):
        VipReconstruction(max_iter=1).fit(bad)


def test_vip_estimator_matches_library_run(tc1_n40):
    problem, truth = tc1_n40
    n = problem.grid.n_nodes
    X = np.stack([problem.g1.mat, problem.g2.mat])
    est = VipReconstruction(max_iter=2).fit(X)
    from cdii import VipConfig, vip_run

    direct = vip_run(problem, VipConfig(max_iter=2))
    assert np.allclose(est.predict(), direct.sigma.mat, atol=1e-12)
    from cdii import relative_l2_error

    expected = -relative_l2_error(direct.sigma, truth)
    assert est.score(X, truth.mat) == pytest.approx(expected, rel=1e-12)
