"""
Tests for the Gaussian copula helpers.
"""

import numpy as np
import pytest
from scipy import integrate
from scipy.special import ndtr, ndtri

from src.density.copula import (
    CopulaParams,
    copula_density,
    copula_logpdf,
    copula_max_given,
    copula_mode_given,
    sample_copula_conditional,
    sample_copula_pair,
)
from src.utils.errors import DomainError


def test_independence_at_zero():
    assert copula_density(0.3, 0.8, 0.0) == pytest.approx(1.0)


def test_integrates_to_one():
    total, _ = integrate.dblquad(lambda x2, x1: copula_density(x1, x2, 0.6), 1e-9, 1 - 1e-9, 1e-9, 1 - 1e-9)
    assert total == pytest.approx(1.0, abs=1e-3)


def test_uniform_margin():
    margin, _ = integrate.quad(lambda x2: copula_density(0.3, x2, 0.5), 1e-12, 1 - 1e-12)
    assert margin == pytest.approx(1.0, abs=1e-4)


def test_symmetric():
    assert copula_logpdf(0.2, 0.9, 0.4) == pytest.approx(copula_logpdf(0.9, 0.2, 0.4))


def test_conditional_mode_and_max():
    rho, x_other = 0.7, 0.85
    grid = np.linspace(1e-4, 1 - 1e-4, 20001)
    values = copula_logpdf(grid, x_other, rho)
    assert copula_mode_given(x_other, rho) == pytest.approx(grid[np.argmax(values)], abs=1e-3)
    assert copula_max_given(x_other, rho) == pytest.approx(values.max(), abs=1e-6)


def test_mode_at_center_for_median():
    assert copula_mode_given(0.5, 0.9) == pytest.approx(0.5)


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_invalid_rho(rho):
    with pytest.raises(DomainError):
        copula_density(0.5, 0.5, rho)


def test_params_restricted_to_nonnegative():
    CopulaParams(rho=0.0)
    with pytest.raises(DomainError):
        CopulaParams(rho=-0.2)
    with pytest.raises(DomainError):
        CopulaParams(rho=1.0)


def test_boundary_arguments_rejected():
    with pytest.raises(DomainError):
        copula_density(0.0, 0.5, 0.3)


def test_pair_sampler_rank_correlation(rng):
    x1, x2 = sample_copula_pair(0.8, rng, size=50_000)
    assert np.all((x1 >= 0) & (x1 <= 1))
    # Spearman correlation of the Gaussian copula: (6/pi) asin(rho/2)
    ranks1 = np.argsort(np.argsort(x1))
    ranks2 = np.argsort(np.argsort(x2))
    spearman = np.corrcoef(ranks1, ranks2)[0, 1]
    assert spearman == pytest.approx(6.0 / np.pi * np.arcsin(0.4), abs=0.01)


def test_conditional_sampler_median(rng):
    draws = sample_copula_conditional(np.full(20_000, 0.9), 0.95, rng)
    assert np.median(draws) == pytest.approx(ndtr(0.95 * ndtri(0.9)), abs=0.02)


@pytest.mark.parametrize("x_other, rho, mode, log_max", [
    (0.9, 0.5, 0.99481, 0.96500),
    (0.2, 0.3, 0.00251, None),
])
def test_conditional_mode_known_values(x_other, rho, mode, log_max):
    assert copula_mode_given(x_other, rho) == pytest.approx(mode, abs=1e-4)
    if log_max is not None:
        assert copula_max_given(x_other, rho) == pytest.approx(log_max, abs=1e-4)


def test_flat_at_zero_correlation():
    assert copula_max_given(0.97, 0.0) == 0.0
    assert copula_mode_given(0.97, 0.0) == 0.5


def test_vectorized_mode_and_max():
    x_other = np.array([0.1, 0.5, 0.9])
    modes = copula_mode_given(x_other, 0.6)
    assert modes.shape == (3,)
    assert modes[1] == pytest.approx(0.5)
    assert modes[0] == pytest.approx(1.0 - modes[2])
    np.testing.assert_allclose(copula_max_given(x_other, 0.0), 0.0)


def test_mode_matches_grid_on_random_fixtures():
    fixtures = np.random.default_rng(2024)
    # uniform spacing on the Gaussian scale keeps the grid fine near 0 and 1
    a_grid = np.linspace(-8.0, 8.0, 80_001)
    x_grid = ndtr(a_grid)
    for _ in range(1000):
        x_other = fixtures.uniform(0.01, 0.99)
        rho = fixtures.uniform(0.35, 0.95)
        values = copula_logpdf(x_grid, x_other, rho)
        best = int(np.argmax(values))
        assert copula_mode_given(x_other, rho) == pytest.approx(x_grid[best], abs=1e-4)
        assert copula_max_given(x_other, rho) == pytest.approx(values[best], abs=1e-6)


def test_max_dominates_on_random_fixtures():
    fixtures = np.random.default_rng(99)
    x_grid = np.linspace(1e-6, 1 - 1e-6, 5001)
    for _ in range(1000):
        x_other = fixtures.uniform(1e-4, 1 - 1e-4)
        rho = fixtures.uniform(-0.99, 0.99)
        log_top = copula_max_given(x_other, rho)
        assert np.all(copula_logpdf(x_grid, x_other, rho) <= log_top + 1e-9)
