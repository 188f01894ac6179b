"""
Pytest configuration and fixtures for tests.
"""
import numpy as np
import pytest

from src.utils.config import Config


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical checks (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(12345)


@pytest.fixture
def uni_data(rng):
    """Small right-skewed univariate sample away from zero."""
    return rng.gamma(3.0, 1.0, size=25)[:, None] + 1.0


@pytest.fixture
def biv_data(rng):
    """Small correlated bivariate sample."""
    cov = np.array([[1.0, 0.5], [0.5, 1.0]])
    return rng.multivariate_normal([3.0, 6.0], cov, size=20)


@pytest.fixture
def short_config(tmp_path):
    """Config for quick end-to-end runs."""
    def _make(model: str = "uni_marginal", **chain):
        settings = {"iterations": 60, "burn_in": 10, "thin": 5, "seed": 7, "show_progress": False}
        settings.update(chain)
        return Config.from_dict({
            "model": model,
            "priors": {"sigma_mu2": 10.0, "sigma_kappa2": 100.0, "alpha_c": 2.0, "beta_c": 2.0,
                       "alpha_M": 2.0, "beta_M": 2.0},
            "chain": settings,
            "io": {"output_directory": str(tmp_path / "run")},
            "log_level": "WARNING",
        })
    return _make
