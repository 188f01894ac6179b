"""
Tests for the synthetic data generators and the dependence study.
"""

import numpy as np
import pytest

from src.simulate.dependence import DEFAULT_GRID, dependence_study, sample_correlation, sign_study
from src.simulate.generators import SimSpec, correlated_normals, coupled_sample, generate
from src.utils.errors import ConfigError


class TestGenerators:
    def test_model_a(self):
        dataset = generate(SimSpec(kind="model_A", n=5000, seed=1))
        assert dataset.columns == ["y"]
        assert dataset.values.mean() == pytest.approx(100.0, abs=5.0)
        assert dataset.values.std() == pytest.approx(100.0, rel=0.05)

    @pytest.mark.parametrize("convention,mean", [("rate", 0.3), ("scale", 30.0)])
    def test_model_b_conventions(self, convention, mean):
        dataset = generate(SimSpec(kind="model_B", n=20_000, seed=2, params={"gamma_convention": convention}))
        assert dataset.values.mean() == pytest.approx(mean, rel=0.03)

    def test_model_b_bad_convention(self):
        with pytest.raises(ConfigError):
            generate(SimSpec(kind="model_B", n=10, params={"gamma_convention": "shape"}))

    def test_biv_normal(self):
        dataset = generate(SimSpec(kind="biv_normal", n=20_000, seed=3))
        assert dataset.columns == ["y1", "y2"]
        assert np.allclose(dataset.values.mean(axis=0), [30.0, 60.0], atol=0.1)
        assert np.cov(dataset.values.T)[0, 1] == pytest.approx(5.0, rel=0.05)

    def test_seed_reproducible(self):
        spec = SimSpec(kind="generative_kernel", n=50, seed=11)
        assert np.array_equal(generate(spec).values, generate(spec).values)

    def test_generative_kernel_mode(self):
        spec = SimSpec(
            kind="generative_kernel", n=20_000, seed=4,
            params={"weights": [0.5, 0.5], "mus": [[3.0], [-3.0]], "c": [50.0], "kappa": [2.0]},
        )
        y = generate(spec).values[:, 0]
        # mass splits evenly around kappa
        assert np.mean(y > 2.0) == pytest.approx(0.5, abs=0.02)

    def test_generative_kernel_bivariate(self):
        spec = SimSpec(
            kind="generative_kernel", n=200, seed=5,
            params={"weights": [1.0], "mus": [[2.0, 4.0]], "c": [10.0, 10.0], "kappa": [0.0, 1.0], "rho": 0.5},
        )
        assert generate(spec).values.shape == (200, 2)

    def test_zero_mean_component_rejected(self):
        with pytest.raises(ConfigError):
            generate(SimSpec(kind="generative_kernel", n=5, params={"mus": [[0.0]]}))

    def test_missing_parameter(self):
        spec = SimSpec(kind="model_A", n=5)
        spec.params["mean"] = None
        with pytest.raises(ConfigError):
            generate(spec)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            SimSpec(kind="model_C", n=10)
        with pytest.raises(ValueError):
            SimSpec(kind="model_A", n=0)


class TestCoupling:
    def test_correlated_normals(self, rng):
        e1, e2 = correlated_normals(-0.7, rng, 50_000)
        assert np.corrcoef(e1, e2)[0, 1] == pytest.approx(-0.7, abs=0.01)

    def test_perfect_correlation_allowed(self, rng):
        e1, e2 = correlated_normals(1.0, rng, 10)
        assert np.allclose(e1, e2)

    def test_invalid_correlation(self, rng):
        with pytest.raises(ConfigError):
            correlated_normals(1.2, rng, 10)

    def test_invalid_side(self, rng):
        with pytest.raises(ConfigError):
            coupled_sample("Y", (10.0, 10.0), (100.0, 100.0), 0.5, 10, rng)

    def test_z_dependence_carries_to_y(self, rng):
        y = coupled_sample("Z", (10.0, 10.0), (100.0, 100.0), 0.9, 20_000, rng)
        assert sample_correlation(y) < 0.1

    def test_x_dependence_sign(self, rng):
        y = coupled_sample("X", (10.0, -10.0), (100.0, 100.0), 0.8, 20_000, rng)
        assert sample_correlation(y) < -0.5


class TestDependenceStudy:
    def test_band_table(self, rng):
        table = dependence_study("X", (10.0, 10.0), grid=(-0.5, 0.0, 0.5), reps=20, n=50, rng=rng)
        assert list(table.columns) == ["rho", "lower", "median", "upper", "mean"]
        assert len(table) == 3
        assert (table["lower"] <= table["median"]).all()
        assert (table["median"] <= table["upper"]).all()
        assert table["median"].is_monotonic_increasing

    def test_grid_points_independent_of_order(self):
        forward = dependence_study("Z", (10.0, 10.0), grid=(0.2, 0.6), reps=5, n=30, rng=np.random.default_rng(1))
        again = dependence_study("Z", (10.0, 10.0), grid=(0.2, 0.6), reps=5, n=30, rng=np.random.default_rng(1))
        assert forward.equals(again)

    def test_default_grid(self):
        assert len(DEFAULT_GRID) == 21
        assert DEFAULT_GRID[0] == -1.0 and DEFAULT_GRID[-1] == 1.0

    def test_bad_side(self, rng):
        with pytest.raises(ConfigError):
            dependence_study("W", (10.0, 10.0), rng=rng)

    def test_sign_study(self, rng):
        table = sign_study(n=2000, rng=rng)
        assert len(table) == 12
        assert table["matches"].all()
