"""
Tests for adaptive rejection sampling.
"""

import numpy as np
import pytest
from scipy import stats

from src.samplers.ars import AdaptiveRejectionSampler, Envelope
from src.utils.errors import BoundViolationError, DomainError, NumericalError


def beta_log_density(a, b):
    def log_density(x):
        x = np.asarray(x, dtype=float)
        return (a - 1) * np.log(x) + (b - 1) * np.log1p(-x), (a - 1) / x - (b - 1) / (1 - x)
    return log_density


def normal_log_density(x):
    x = np.asarray(x, dtype=float)
    return -0.5 * x * x, -x


def test_beta_draws(rng):
    sampler = AdaptiveRejectionSampler(beta_log_density(2.0, 3.0), [0.1, 0.4, 0.8], lower=0.0, upper=1.0)
    draws = sampler.sample(rng, size=3000)
    assert stats.kstest(draws, stats.beta(2.0, 3.0).cdf).pvalue > 0.001


def test_unbounded_normal(rng):
    sampler = AdaptiveRejectionSampler(normal_log_density, [-1.0, 1.0])
    draws = sampler.sample(rng, size=3000)
    assert stats.kstest(draws, "norm").pvalue > 0.001


def test_hull_tightens(rng):
    sampler = AdaptiveRejectionSampler(normal_log_density, [-1.0, 1.0])
    sampler.sample(rng, size=200)
    assert len(sampler.hull.x) > 2


def test_envelope_bounds():
    x = np.array([-1.0, 0.5, 2.0])
    h, dh = normal_log_density(x)
    envelope = Envelope(x, h, dh, -np.inf, np.inf)
    for value in np.linspace(-3.0, 3.0, 61):
        true = -0.5 * value * value
        assert envelope.u(value) >= true - 1e-12
        assert envelope.l(value) <= true + 1e-12


def test_monotone_density_on_interval(rng):
    # exp(2x) on [0, 1]: the whole mass sits in one increasing piece
    sampler = AdaptiveRejectionSampler(lambda x: (2.0 * x, np.full(np.shape(x), 2.0)), [0.5], 0.0, 1.0)
    draws = sampler.sample(rng, size=3000)
    cdf = lambda v: np.expm1(2.0 * v) / np.expm1(2.0)
    assert stats.kstest(draws, cdf).pvalue > 0.001


def test_not_log_concave_detected(rng):
    convex = lambda x: (5.0 * np.asarray(x) ** 2, 10.0 * np.asarray(x))
    sampler = AdaptiveRejectionSampler(convex, [0.45, 0.55], 0.0, 1.0)
    with pytest.raises(BoundViolationError):
        sampler.sample(rng, size=500)


def test_unbounded_end_needs_slope():
    with pytest.raises(DomainError):
        AdaptiveRejectionSampler(normal_log_density, [1.0, 2.0])


def test_support_points_inside_interval():
    with pytest.raises(DomainError):
        AdaptiveRejectionSampler(beta_log_density(2.0, 2.0), [1.5], 0.0, 1.0)


def test_proposal_cap(rng):
    # Density vanishing on most of the hull region, with max_iter = 1
    def spiky(x):
        x = np.asarray(x, dtype=float)
        return -200.0 * (x - 0.5) ** 2, -400.0 * (x - 0.5)

    sampler = AdaptiveRejectionSampler(spiky, [0.01, 0.99], 0.0, 1.0, max_iter=1)
    with pytest.raises(NumericalError):
        for _ in range(50):
            sampler.draw(rng)
