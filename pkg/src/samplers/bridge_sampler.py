"""
Univariate sampler that keeps the latent uniforms x, the one-dimensional
version of what the bivariate model requires.
"""

import numpy as np

from src.density.kernel import latent_logpdf, sample_unimodal
from src.samplers.base_sampler import BaseSampler
from src.samplers.latent import sample_x
from src.samplers.marginal_sampler import MarginalSampler
from src.samplers.state import ChainState, UniChainState


class BridgeSampler(BaseSampler):
    """
    Sweep: slices, M and sticks, means and c given x, then (d, kappa) with x
    integrated out followed by a fresh x from its conditional.
    """

    model_name = "uni_bridge"
    dim = 1
    keeps_latent = True
    state_class = UniChainState

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # the (d, kappa) block is the marginal sampler's
        self._marginal = MarginalSampler(self.priors, self.tuning, self.options)
        self._marginal.acceptance = self.acceptance
        self._marginal.logger = self.logger

    def sweep(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> ChainState:
        y = np.asarray(data, dtype=float).reshape(-1)

        self.update_slices(state, rng)
        self.update_concentration(state, rng)
        self.update_mus(state, 0, self._mu_log_lik(state, y), rng)
        state.c[0] = self.gibbs_c(y, state.x[:, 0], state.mus[state.alloc.d, 0], float(state.kappa[0]), rng)
        self.update_allocations(state, self._marginal._log_kernel_matrix(state, y), rng)
        self.update_kappa(state, 0, y, self._marginal._kappa_log_kernel(state, y), rng)
        state.x[:, 0] = self.sample_latent(state, y, rng)
        return state

    def sample_latent(self, state: ChainState, y: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return sample_x(
            y, state.mus[state.alloc.d, 0], float(state.c[0]), float(state.kappa[0]), rng,
            trial_cap=self.tuning.x_trial_cap, ars_max_iter=self.tuning.ars_max_iter
        )

    def log_likelihood(self, state: ChainState, data: np.ndarray) -> float:
        y = np.asarray(data, dtype=float).reshape(-1)
        return float(np.sum(latent_logpdf(y, state.x[:, 0], state.mus[state.alloc.d, 0], state.c[0], state.kappa[0])))

    def regenerate_data(self, state: ChainState, rng: np.random.Generator) -> np.ndarray:
        y = sample_unimodal(state.mus[state.alloc.d, 0], state.c[0], state.kappa[0], rng, x=state.x[:, 0])
        return np.atleast_1d(y)[:, None]

    def _initial_latent(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.sample_latent(state, np.asarray(data, dtype=float).reshape(-1), rng)[:, None]

    def _prior_latent(self, n: int, rho: float, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(size=(n, 1))

    def _mu_log_lik(self, state: ChainState, y: np.ndarray):
        x, c, kappa = state.x[:, 0], float(state.c[0]), float(state.kappa[0])
        return lambda idx, mu: latent_logpdf(y[idx], x[idx], mu, c, kappa)
