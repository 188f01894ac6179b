"""
Univariate sampler on the closed-form kernel, with x integrated out.
"""

import math

import numpy as np

from src.density.kernel import sample_unimodal, unimodal_logpdf
from src.samplers.base_sampler import BaseSampler, log_gamma_prior
from src.samplers.state import ChainState, UniChainState


class MarginalSampler(BaseSampler):
    """
    Sweep: slices, M and sticks, means, c, allocations, then the joint
    (kappa, d) move.
    """

    model_name = "uni_marginal"
    dim = 1
    state_class = UniChainState

    def sweep(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> ChainState:
        y = np.asarray(data, dtype=float).reshape(-1)

        self.update_slices(state, rng)
        self.update_concentration(state, rng)
        self.update_mus(state, 0, self._mu_log_lik(state, y), rng)
        self.update_c(state, y, rng)
        self.update_allocations(state, self._log_kernel_matrix(state, y), rng)
        self.update_kappa(state, 0, y, self._kappa_log_kernel(state, y), rng)
        return state

    def update_c(self, state: ChainState, y: np.ndarray, rng: np.random.Generator) -> float:
        """Log random walk on c with a Gamma(alpha_c, beta_c) prior."""
        c = float(state.c[0])
        c_star = c * math.exp(self.tuning.h_c * rng.standard_normal())
        log_q = self.c_log_ratio(y, state.mus[state.alloc.d, 0], float(state.kappa[0]), c_star, c)
        accepted = bool(np.log(rng.uniform()) < log_q)
        self.acceptance.record("c", accepted)
        if accepted:
            state.c[0] = c_star
        return float(state.c[0])

    def c_log_ratio(self, y: np.ndarray, mu: np.ndarray, kappa: float, c_star: float, c: float) -> float:
        """log acceptance ratio of c -> c_star, including the log-scale Jacobian c_star/c."""
        with np.errstate(invalid="ignore"):
            log_lik = np.sum(unimodal_logpdf(y, mu, c_star, kappa)) - np.sum(unimodal_logpdf(y, mu, c, kappa))
        value = (
            log_lik
            + log_gamma_prior(c_star, self.priors.alpha_c, self.priors.beta_c)
            - log_gamma_prior(c, self.priors.alpha_c, self.priors.beta_c)
            + math.log(c_star) - math.log(c)
        )
        return -math.inf if math.isnan(value) else float(value)

    def log_likelihood(self, state: ChainState, data: np.ndarray) -> float:
        y = np.asarray(data, dtype=float).reshape(-1)
        return float(np.sum(unimodal_logpdf(y, state.mus[state.alloc.d, 0], state.c[0], state.kappa[0])))

    def regenerate_data(self, state: ChainState, rng: np.random.Generator) -> np.ndarray:
        y = sample_unimodal(state.mus[state.alloc.d, 0], state.c[0], state.kappa[0], rng)
        return np.atleast_1d(y)[:, None]

    def _mu_log_lik(self, state: ChainState, y: np.ndarray):
        c, kappa = float(state.c[0]), float(state.kappa[0])
        return lambda idx, mu: unimodal_logpdf(y[idx], mu, c, kappa)

    def _log_kernel_matrix(self, state: ChainState, y: np.ndarray) -> np.ndarray:
        return unimodal_logpdf(y[:, None], state.mus[None, :, 0], state.c[0], state.kappa[0])

    def _kappa_log_kernel(self, state: ChainState, y: np.ndarray):
        mus, c = state.mus[:, 0], float(state.c[0])
        return lambda idx, comps, kappa: unimodal_logpdf(y[idx], mus[comps], c, kappa)
