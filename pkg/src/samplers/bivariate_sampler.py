"""
Bivariate sampler: one unimodal kernel per dimension, latent uniforms
coupled by a Gaussian copula, one shared allocation per observation pair.
"""

import math
from typing import Optional

import numpy as np

from src.density.copula import clamp_unit, copula_logpdf, sample_copula_pair
from src.density.kernel import latent_argmax, latent_logpdf, sample_unimodal, unimodal_logpdf
from src.samplers.base_sampler import BaseSampler
from src.samplers.latent import sample_x_pair
from src.samplers.state import BivChainState, ChainState


class BivariateSampler(BaseSampler):
    """
    Sweep: slices, M and sticks, means per dimension, c_1 and c_2, kappa_1
    and kappa_2, allocations, latent pairs, then rho.
    """

    model_name = "bivariate"
    dim = 2
    keeps_latent = True
    state_class = BivChainState

    def sweep(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> ChainState:
        y = np.asarray(data, dtype=float)

        self.update_slices(state, rng)
        self.update_concentration(state, rng)
        for l in (0, 1):
            self.update_mus(state, l, self._mu_log_lik(state, y, l), rng)
        for l in (0, 1):
            state.c[l] = self.gibbs_c(y[:, l], state.x[:, l], state.mus[state.alloc.d, l], float(state.kappa[l]), rng)
        for l in (0, 1):
            self.update_kappa_biv(l, state, y, rng)
        self.update_allocations(state, self._log_kernel_matrix(state, y, self.options.biv_d_pmf), rng)
        state.x = self.sample_latent(state, y, rng)
        if self.options.fixed_rho is None:
            self.update_rho(state, rng)
        return state

    def update_kappa_biv(self, l: int, state: ChainState, y: np.ndarray, rng: np.random.Generator) -> bool:
        """
        kappa_l move; reassignments change the shared allocation, so the other
        dimension's kernel enters the ratio for every reassigned pair.
        """
        other = 1 - l
        latent = self.options.biv_kappa_kernel == "latent"
        mus = state.mus
        c_l, c_o, kappa_o = float(state.c[l]), float(state.c[other]), float(state.kappa[other])
        y_l, y_o = y[:, l], y[:, other]
        x = state.x

        if latent:
            def log_kernel(idx, comps, kappa):
                return latent_logpdf(y_l[idx], x[idx, l], mus[comps, l], c_l, kappa)

            def extra(idx, comps):
                return latent_logpdf(y_o[idx], x[idx, other], mus[comps, other], c_o, kappa_o)
        else:
            def log_kernel(idx, comps, kappa):
                return unimodal_logpdf(y_l[idx], mus[comps, l], c_l, kappa)

            def extra(idx, comps):
                return unimodal_logpdf(y_o[idx], mus[comps, other], c_o, kappa_o)

        accepted, changed = self.update_kappa(state, l, y_l, log_kernel, rng, extra=extra)
        if accepted and len(changed):
            state.x[changed] = self.sample_latent(state, y, rng, rows=changed)
        return accepted

    def update_rho(self, state: ChainState, rng: np.random.Generator) -> float:
        """Logit random walk on rho with a uniform prior."""
        rho = float(state.rho)
        logit = math.log(rho / (1.0 - rho)) + self.tuning.h_rho * rng.standard_normal()
        rho_star = 1.0 / (1.0 + math.exp(-logit))
        log_q = self.rho_log_ratio(state.x, rho_star, rho)
        accepted = bool(np.log(rng.uniform()) < log_q)
        self.acceptance.record("rho", accepted)
        if accepted:
            state.rho = rho_star
        return float(state.rho)

    @staticmethod
    def rho_log_ratio(x: np.ndarray, rho_star: float, rho: float) -> float:
        """log acceptance ratio of rho -> rho_star, with the logit Jacobian."""
        if not 0.0 < rho_star < 1.0:
            return -math.inf
        x = clamp_unit(x)
        value = (
            np.sum(copula_logpdf(x[:, 0], x[:, 1], rho_star)) - np.sum(copula_logpdf(x[:, 0], x[:, 1], rho))
            + math.log(rho_star * (1.0 - rho_star)) - math.log(rho * (1.0 - rho))
        )
        return -math.inf if math.isnan(value) else float(value)

    def sample_latent(
        self,
        state: ChainState,
        y: np.ndarray,
        rng: np.random.Generator,
        rows: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """Hybrid copula/ARS update of the latent pairs (all rows unless ``rows`` is given)."""
        if rows is None:
            rows = np.arange(len(y))
        mu = state.mus[state.alloc.d[rows]]
        x_current = state.x[rows] if state.x is not None else clamp_unit(latent_argmax(y[rows], mu, state.c, state.kappa))
        x, n_fallback = sample_x_pair(
            y[rows], mu, state.c, state.kappa, x_current, float(state.rho), rng,
            trial_cap=self.tuning.trial_cap,
            x_trial_cap=self.tuning.x_trial_cap,
            ars_max_iter=self.tuning.ars_max_iter,
            observations=rows,
        )
        self.acceptance.record("x_copula", len(rows) - n_fallback, len(rows))
        if n_fallback:
            self.logger.debug(f"{n_fallback} latent pair(s) fell back to adaptive rejection sampling")
        return x

    def log_likelihood(self, state: ChainState, data: np.ndarray) -> float:
        y = np.asarray(data, dtype=float)
        mu = state.mus[state.alloc.d]
        latent = np.sum(latent_logpdf(y, state.x, mu, state.c, state.kappa))
        x = clamp_unit(state.x)
        return float(latent + np.sum(copula_logpdf(x[:, 0], x[:, 1], state.rho)))

    def regenerate_data(self, state: ChainState, rng: np.random.Generator) -> np.ndarray:
        return np.asarray(sample_unimodal(state.mus[state.alloc.d], state.c, state.kappa, rng, x=state.x))

    def _initial_latent(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        state.x = None
        return self.sample_latent(state, np.asarray(data, dtype=float), rng)

    def _prior_latent(self, n: int, rho: float, rng: np.random.Generator) -> np.ndarray:
        x1, x2 = sample_copula_pair(rho, rng, size=n)
        return np.column_stack([x1, x2])

    def _prior_rho(self, rng: np.random.Generator) -> float:
        return float(rng.uniform())

    def _mu_log_lik(self, state: ChainState, y: np.ndarray, l: int):
        x, c, kappa = state.x[:, l], float(state.c[l]), float(state.kappa[l])
        return lambda idx, mu: latent_logpdf(y[idx, l], x[idx], mu, c, kappa)

    def _log_kernel_matrix(self, state: ChainState, y: np.ndarray, kind: str) -> np.ndarray:
        mus = state.mus
        if kind == "latent":
            terms = [
                latent_logpdf(y[:, None, l], state.x[:, None, l], mus[None, :, l], state.c[l], state.kappa[l])
                for l in (0, 1)
            ]
        else:
            terms = [unimodal_logpdf(y[:, None, l], mus[None, :, l], state.c[l], state.kappa[l]) for l in (0, 1)]
        return terms[0] + terms[1]
