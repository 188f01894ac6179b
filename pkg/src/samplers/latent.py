"""
Exact samplers for the latent uniforms x given an observation and its component.

Univariate: rejection from U(0, 1) under the latent density's maximum, with
adaptive rejection for observations that exhaust the proposal cap.
Bivariate: copula proposals under the product of the two maxima, with a
per-coordinate fallback that mixes adaptive-rejection and copula-conditional
proposals.
"""

import math
from typing import Optional, Tuple

import numpy as np

from src.density.copula import (
    clamp_unit,
    copula_logpdf,
    copula_max_given,
    sample_copula_conditional,
    sample_copula_pair,
)
from src.density.kernel import latent_argmax, latent_logpdf
from src.samplers.ars import AdaptiveRejectionSampler
from src.utils.errors import BoundViolationError, NumericalError

# Largest log acceptance ratio tolerated as rounding above 1
LOG_BOUND_SLACK = math.log1p(1e-9)


def _check_bound(log_ratio: np.ndarray, observations: np.ndarray, what: str):
    bad = log_ratio > LOG_BOUND_SLACK
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise BoundViolationError(
            f"{what} acceptance ratio exp({log_ratio[k]:.3g}) exceeds 1", observation=int(observations[k])
        )


def sample_x(
    y: np.ndarray,
    mu: np.ndarray,
    c: float,
    kappa: float,
    rng: np.random.Generator,
    trial_cap: int = 10_000,
    ars_max_iter: int = 1000,
    observations: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Draw x_i from the density proportional to latent(y_i, x) on (0, 1], one per observation.

    Uniform proposals are accepted with latent(x)/latent(x-hat). The
    acceptance rate is roughly |y - kappa| |mu|, so observations still
    pending after ``trial_cap`` rounds are drawn exactly by adaptive
    rejection sampling instead.

    Args:
        y: Observations (none equal to kappa)
        mu: Component mean of each observation
        trial_cap: Uniform proposals per observation before switching to ARS
        ars_max_iter: Proposals allowed per ARS draw
        observations: Indices used in error messages (defaults to positions)

    Raises:
        NumericalError: The ARS fallback made no draw in ``ars_max_iter`` proposals
        BoundViolationError: The maximizer failed to dominate a proposal
    """
    y, mu = np.broadcast_arrays(np.atleast_1d(np.asarray(y, dtype=float)), np.atleast_1d(np.asarray(mu, dtype=float)))
    if observations is None:
        observations = np.arange(len(y))
    log_top = np.asarray(latent_logpdf(y, latent_argmax(y, mu, c, kappa), mu, c, kappa))

    out = np.empty(len(y))
    pending = np.ones(len(y), dtype=bool)
    for _ in range(trial_cap):
        idx = np.flatnonzero(pending)
        if len(idx) == 0:
            break
        proposal = rng.uniform(size=len(idx))
        log_ratio = np.asarray(latent_logpdf(y[idx], proposal, mu[idx], c, kappa)) - log_top[idx]
        _check_bound(log_ratio, observations[idx], "latent-x")
        accept = np.log(rng.uniform(size=len(idx))) < log_ratio
        out[idx[accept]] = proposal[accept]
        pending[idx[accept]] = False
    for i in np.flatnonzero(pending):
        try:
            out[i] = latent_ars(y[i], mu[i], c, kappa, max_iter=ars_max_iter).draw(rng)
        except NumericalError as err:
            if err.observation is not None:
                raise
            raise type(err)(str(err), observation=int(observations[i])) from err
    return out


def sample_x_pair_copula(
    y: np.ndarray,
    mu: np.ndarray,
    c: np.ndarray,
    kappa: np.ndarray,
    rho: float,
    rng: np.random.Generator,
    trial_cap: int,
    observations: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Copula-proposal rejection sampler for (x1, x2) pairs.

    Proposals come from the copula; acceptance is the product of
    latent(x_l)/latent(x-hat_l) over the two coordinates.

    Args:
        y, mu: (n, 2) observations and component means
        c, kappa: Per-dimension parameters, shape (2,)
        trial_cap: Proposals per pair before giving up

    Returns:
        (x pairs, accepted mask); rows not accepted are NaN
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    mu = np.atleast_2d(np.asarray(mu, dtype=float))
    if observations is None:
        observations = np.arange(len(y))
    x_hat = np.asarray(latent_argmax(y, mu, c, kappa))
    log_top = np.asarray(latent_logpdf(y, x_hat, mu, c, kappa)).sum(axis=1)

    out = np.full(y.shape, np.nan)
    pending = np.ones(len(y), dtype=bool)
    for _ in range(trial_cap):
        idx = np.flatnonzero(pending)
        if len(idx) == 0:
            break
        x1, x2 = sample_copula_pair(rho, rng, size=len(idx))
        proposal = np.column_stack([x1, x2])
        log_ratio = np.asarray(latent_logpdf(y[idx], proposal, mu[idx], c, kappa)).sum(axis=1) - log_top[idx]
        _check_bound(log_ratio, observations[idx], "copula-proposal")
        accept = np.log(rng.uniform(size=len(idx))) < log_ratio
        out[idx[accept]] = proposal[accept]
        pending[idx[accept]] = False
    return out, ~pending


def latent_ars(y: float, mu: float, c: float, kappa: float, max_iter: int = 1000) -> AdaptiveRejectionSampler:
    """ARS over (0, 1] for the density in x proportional to latent(y, x)."""
    t = y - kappa
    sigma2 = mu * mu / c

    def log_density(x: np.ndarray):
        z = x / t - mu
        with np.errstate(divide="ignore"):
            return np.log(x) - 0.5 * z * z / sigma2, 1.0 / x - z / (sigma2 * t)

    x_hat = float(latent_argmax(y, mu, c, kappa))
    if x_hat < 1.0:
        points = [0.5 * x_hat, x_hat, x_hat + 0.5 * (1.0 - x_hat)]
    else:
        points = [0.25, 0.6, 0.9, 1.0]
    return AdaptiveRejectionSampler(log_density, points, lower=0.0, upper=1.0, max_iter=max_iter)


def sample_x_coordinate(
    y: float,
    mu: float,
    c: float,
    kappa: float,
    x_other: float,
    rho: float,
    rng: np.random.Generator,
    trial_cap: int = 10_000,
    ars_max_iter: int = 1000,
    observation: Optional[int] = None
) -> float:
    """
    Draw one coordinate from latent(y, x) c(x, x_other; rho).

    Trials alternate between two exact rejection steps: ARS proposals from
    the latent factor accepted with c(x, x_other)/max_x c(x, x_other), and
    copula-conditional proposals accepted with latent(x)/latent(x-hat).
    The second keeps a usable acceptance rate when x_other is near 0 or 1.
    """
    sampler = latent_ars(y, mu, c, kappa, max_iter=ars_max_iter)
    x_other = float(clamp_unit(x_other))
    log_top = copula_max_given(x_other, rho)
    latent_top = float(latent_logpdf(y, latent_argmax(y, mu, c, kappa), mu, c, kappa))
    label = np.array([-1 if observation is None else observation])
    for trial in range(trial_cap):
        if trial % 2 == 0:
            proposal = sampler.draw(rng)
            log_ratio = copula_logpdf(clamp_unit(proposal), x_other, rho) - log_top
            _check_bound(np.array([log_ratio]), label, "copula-conditional")
        else:
            proposal = sample_copula_conditional(x_other, rho, rng)
            log_ratio = latent_logpdf(y, proposal, mu, c, kappa) - latent_top
            _check_bound(np.array([log_ratio]), label, "latent-x")
        if math.log(rng.uniform()) < log_ratio:
            return proposal
    raise NumericalError(f"conditional x sampler hit the cap of {trial_cap} trials", observation=observation)


def sample_x_pair_ars(
    y: np.ndarray,
    mu: np.ndarray,
    c: np.ndarray,
    kappa: np.ndarray,
    x_current: np.ndarray,
    rho: float,
    rng: np.random.Generator,
    trial_cap: int = 10_000,
    ars_max_iter: int = 1000,
    observation: Optional[int] = None
) -> np.ndarray:
    """Update one pair coordinate-wise: x1 | x2, then x2 | new x1."""
    x = np.array(x_current, dtype=float)
    for l in (0, 1):
        x[l] = sample_x_coordinate(
            y[l], mu[l], c[l], kappa[l], x[1 - l], rho, rng,
            trial_cap=trial_cap, ars_max_iter=ars_max_iter, observation=observation
        )
    return x


def sample_x_pair(
    y: np.ndarray,
    mu: np.ndarray,
    c: np.ndarray,
    kappa: np.ndarray,
    x_current: np.ndarray,
    rho: float,
    rng: np.random.Generator,
    trial_cap: int = 100,
    x_trial_cap: int = 10_000,
    ars_max_iter: int = 1000,
    observations: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, int]:
    """
    Hybrid pair update: copula proposals for up to ``trial_cap`` trials, then
    the coordinate-wise ARS kernel for the pairs still pending.

    Returns:
        (new pairs, number of pairs that fell back to ARS)
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    mu = np.atleast_2d(np.asarray(mu, dtype=float))
    x_current = np.atleast_2d(np.asarray(x_current, dtype=float))
    if observations is None:
        observations = np.arange(len(y))

    x, accepted = sample_x_pair_copula(y, mu, c, kappa, rho, rng, trial_cap, observations)
    fallback = np.flatnonzero(~accepted)
    for i in fallback:
        x[i] = sample_x_pair_ars(
            y[i], mu[i], c, kappa, x_current[i], rho, rng,
            trial_cap=x_trial_cap, ars_max_iter=ars_max_iter, observation=int(observations[i])
        )
    return x, len(fallback)
