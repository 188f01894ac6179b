"""
Predictive simulation from retained posterior states: one draw per state,
windowed correlations, conditional prediction of Y2 given Y1, and grid checks
of the bivariate kernel.
"""

import math
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.special import roots_legendre

from src.density.copula import copula_logpdf, sample_copula_conditional
from src.density.kernel import latent_logpdf, sample_unimodal, unimodal_logpdf
from src.mixture.dpmix import predictive_draw
from src.samplers.latent import sample_x
from src.samplers.state import PosteriorDraw
from src.utils.errors import DataError, DomainError

CONDITIONAL_QUANTILES = (0.025, 0.5, 0.975)


def predictive_sample(
    draws: Sequence[PosteriorDraw],
    sigma_mu2: float,
    rng: np.random.Generator
) -> np.ndarray:
    """One predictive observation per posterior state, shape (len(draws), dim)."""
    if not draws:
        raise DataError("no samples")
    return np.vstack([predictive_draw(draw.to_state(), sigma_mu2, rng).y for draw in draws])


def windowed_correlations(values: np.ndarray, window: int = 100) -> np.ndarray:
    """Correlation of the two columns over consecutive non-overlapping windows."""
    values = np.asarray(values, dtype=float)
    n_windows = len(values) // window
    out = np.empty(n_windows)
    for k in range(n_windows):
        block = values[k * window:(k + 1) * window]
        out[k] = np.corrcoef(block[:, 0], block[:, 1])[0, 1]
    return out


def _component_table(draw: PosteriorDraw, sigma_mu2: float, rng: np.random.Generator):
    """Stored weights and means plus one prior component carrying the leftover stick mass."""
    w = draw.to_state().sticks.w
    rest = max(0.0, 1.0 - float(w.sum()))
    extra = rng.normal(0.0, math.sqrt(sigma_mu2), size=(1, draw.mus.shape[1]))
    extra = np.where(extra == 0.0, math.sqrt(sigma_mu2), extra)
    return np.append(w, rest), np.vstack([draw.mus, extra])


def predict_conditional(
    draws: Sequence[PosteriorDraw],
    given: Sequence[float],
    n_draws: int,
    sigma_mu2: float,
    rng: np.random.Generator,
    quantiles: Sequence[float] = CONDITIONAL_QUANTILES,
    x_trial_cap: int = 10_000,
    ars_max_iter: int = 1000
) -> pd.DataFrame:
    """
    Quantiles of Y2 | Y1 = y1 for every value in ``given``.

    Each draw picks a posterior state in turn, a component with probability
    proportional to w_j f(y1 | mu_1j, c_1, kappa_1), x1 from its conditional
    given y1, x2 from the copula given x1, and sets y2 = kappa_2 + x2/z2.

    Returns:
        One row per given value: the value, then one column per quantile
    """
    if not draws:
        raise DataError("no samples")
    if draws[0].mus.shape[1] != 2:
        raise DomainError("conditional prediction needs a bivariate fit")
    given = np.asarray(given, dtype=float)
    samples = np.empty((len(given), n_draws))

    for k in range(n_draws):
        draw = draws[k % len(draws)]
        weights, mus = _component_table(draw, sigma_mu2, rng)
        c1, c2 = draw.c
        kappa1, kappa2 = draw.kappa
        with np.errstate(divide="ignore"):
            log_mass = np.log(weights)[None, :] + unimodal_logpdf(given[:, None], mus[None, :, 0], c1, kappa1)
        log_mass -= log_mass.max(axis=1, keepdims=True)
        probs = np.exp(log_mass)
        probs /= probs.sum(axis=1, keepdims=True)
        comps = (rng.uniform(size=(len(given), 1)) > np.cumsum(probs, axis=1)).sum(axis=1)
        comps = np.minimum(comps, len(weights) - 1)

        at_mode = given == kappa1
        x1 = np.empty(len(given))
        # y1 at the mode carries no information on x1
        x1[at_mode] = rng.uniform(size=int(at_mode.sum()))
        if np.any(~at_mode):
            x1[~at_mode] = sample_x(
                given[~at_mode], mus[comps[~at_mode], 0], c1, kappa1, rng,
                trial_cap=x_trial_cap, ars_max_iter=ars_max_iter
            )
        x2 = np.atleast_1d(sample_copula_conditional(x1, draw.rho, rng))
        samples[:, k] = sample_unimodal(mus[comps, 1], c2, kappa2, rng, x=x2)

    table = pd.DataFrame({"given": given})
    for q, column in zip(quantiles, np.quantile(samples, quantiles, axis=1)):
        table[f"q{q:g}"] = column
    return table


def bivariate_kernel_pdf(
    y1: float,
    y2: float,
    mu: Sequence[float],
    c: Sequence[float],
    kappa: Sequence[float],
    rho: float,
    nodes: int = 64
) -> float:
    """
    Density of one bivariate component: the integral over the unit square
    of c(x1, x2; rho) latent(y1, x1) latent(y2, x2), by tensor Gauss-Legendre.
    """
    t, w = roots_legendre(nodes)
    x = 0.5 * (t + 1.0)
    w = 0.5 * w
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    log_integrand = (
        copula_logpdf(x1, x2, rho)
        + latent_logpdf(y1, x1, mu[0], c[0], kappa[0])
        + latent_logpdf(y2, x2, mu[1], c[1], kappa[1])
    )
    return float(np.sum(np.outer(w, w) * np.exp(log_integrand)))


def is_orthounimodal_on_grid(density: np.ndarray, mode: Optional[tuple] = None, tolerance: float = 1e-12) -> bool:
    """
    Whether a gridded 2-D density is non-increasing along every row and
    column when moving away from ``mode`` (default: the grid maximum).
    """
    density = np.asarray(density, dtype=float)
    if mode is None:
        mode = np.unravel_index(np.argmax(density), density.shape)
    i0, j0 = mode
    slack = tolerance * max(1.0, float(density.max()))
    for axis, centre in ((0, i0), (1, j0)):
        steps = np.diff(density, axis=axis)
        before = steps.take(np.arange(0, centre), axis=axis)
        after = steps.take(np.arange(centre, steps.shape[axis]), axis=axis)
        if np.any(before < -slack) or np.any(after > slack):
            return False
    return True
