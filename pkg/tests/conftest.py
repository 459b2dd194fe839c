"""Shared fixtures: synthetic data sets reused across test modules.

Data generation and the 20-iteration optimizer runs are the expensive
parts of the suite, so they are produced once per session.
"""
from __future__ import annotations

import pytest

from cdii import (
    Grid,
    InverseProblem,
    NoiseSpec,
    PicardConfig,
    ScalarField,
    VipConfig,
    Weights,
    add_noise,
    generate_data_pair,
    picard_run,
    rasterize,
    test_case,
    vip_run,
)


def make_problem(h1, h2) -> InverseProblem:
    return InverseProblem(h1.grid, h1, h2)


def noisy_pair(h1, h2, level: float, seed: int):
    """The data-generation noise convention: independent seeds per excitation."""
    return add_noise(h1, NoiseSpec(level, seed)), add_noise(h2, NoiseSpec(level, seed + 1))


@pytest.fixture(scope="session")
def tc1_n40():
    """Noiseless Test Case 1 data on N=40 (fine mesh N=120) plus the truth."""
    h1, h2 = generate_data_pair(test_case(1), n_fine=120, n_coarse=40)
    truth = rasterize(test_case(1), Grid(40))
    return make_problem(h1, h2), truth


@pytest.fixture(scope="session")
def tc1_n60_clean_pair():
    """Noiseless Test Case 1 data fields on N=60 (fine mesh N=200)."""
    return generate_data_pair(test_case(1), n_fine=200, n_coarse=60)


@pytest.fixture(scope="session")
def tc1_n60_noisy(tc1_n60_clean_pair):
    """Test Case 1 on N=60 with 10% noise, seeds 7/8, plus the truth."""
    h1, h2 = noisy_pair(*tc1_n60_clean_pair, 0.10, 7)
    truth = rasterize(test_case(1), Grid(60))
    return make_problem(h1, h2), truth


@pytest.fixture(scope="session")
def tc2_n60_clean_pair():
    return generate_data_pair(test_case(2), n_fine=200, n_coarse=60)


@pytest.fixture(scope="session")
def tc2_n60_noisy10(tc2_n60_clean_pair):
    h1, h2 = noisy_pair(*tc2_n60_clean_pair, 0.10, 7)
    truth = rasterize(test_case(2), Grid(60))
    return make_problem(h1, h2), truth


@pytest.fixture(scope="session")
def tc2_n60_noisy25(tc2_n60_clean_pair):
    h1, h2 = noisy_pair(*tc2_n60_clean_pair, 0.25, 7)
    truth = rasterize(test_case(2), Grid(60))
    return make_problem(h1, h2), truth


@pytest.fixture(scope="session")
def vip_tc1_result(tc1_n60_noisy):
    """The 20-iteration reference run with the experiment defaults."""
    problem, _ = tc1_n60_noisy
    return vip_run(problem, VipConfig())


@pytest.fixture(scope="session")
def picard_tc1_result(tc1_n60_noisy):
    problem, _ = tc1_n60_noisy
    return picard_run(problem, PicardConfig())


@pytest.fixture
def perfect_zero_problem():
    """Exact data for sigma_true = 0 on a small grid: H1 = H2 = 1."""
    grid = Grid(12)
    one = ScalarField.constant(grid, 1.0)
    return make_problem(one, one)


@pytest.fixture
def default_weights():
    return Weights()
