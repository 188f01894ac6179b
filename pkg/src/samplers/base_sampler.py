"""
Base sampler class shared by the three MCMC samplers.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.mixture.dpmix import (
    AllocationState,
    SliceSchedule,
    StickState,
    draw_component,
    sample_allocations,
    sample_slices,
    update_M,
    update_M_given_sticks,
    update_sticks,
)
from src.samplers.kappa_move import KappaMoveConfig, LogAlloc, LogKernel, propose_kappa_move
from src.samplers.state import ChainState
from src.utils.config import Config, PriorConfig, SamplerOptions, TuningConfig
from src.utils.errors import DataError, DomainError, NumericalError
from src.utils.logger import setup_logger

# log f(y_i | mu) for observation indices and per-observation means
LogLik = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class AcceptanceTracker:
    """Proposal and acceptance counts per move type."""

    proposed: Dict[str, int] = field(default_factory=dict)
    accepted: Dict[str, int] = field(default_factory=dict)

    def record(self, move: str, accepted: int, proposed: int = 1):
        self.proposed[move] = self.proposed.get(move, 0) + int(proposed)
        self.accepted[move] = self.accepted.get(move, 0) + int(accepted)

    def rates(self) -> Dict[str, float]:
        return {
            move: self.accepted.get(move, 0) / count
            for move, count in sorted(self.proposed.items()) if count > 0
        }

    def merge(self, other: "AcceptanceTracker"):
        for move, count in other.proposed.items():
            self.record(move, other.accepted.get(move, 0), count)

    def reset(self):
        self.proposed.clear()
        self.accepted.clear()


def initial_kappa(y: np.ndarray) -> float:
    """Sample median, nudged off the data to the midpoint of the gap above it when they coincide."""
    kappa = float(np.median(y))
    if np.any(y == kappa):
        above = y[y > kappa]
        below = y[y < kappa]
        if len(above):
            kappa = 0.5 * (kappa + float(above.min()))
        elif len(below):
            kappa = 0.5 * (kappa + float(below.max()))
        else:
            kappa = kappa - 1.0
    return kappa


def log_gamma_prior(value: float, shape: float, rate: float) -> float:
    """Unnormalized log Gamma(shape, rate) density."""
    return (shape - 1.0) * math.log(value) - rate * value


class BaseSampler(ABC):
    """
    Abstract base class for the MCMC samplers.

    Each sampler defines one sweep over the full state:
    - MarginalSampler: closed-form kernel, x integrated out
    - BridgeSampler: keeps latent x, marginal (d, kappa) block
    - BivariateSampler: latent x pairs coupled by the Gaussian copula
    """

    model_name: str = ""
    dim: int = 1
    keeps_latent: bool = False
    state_class = ChainState

    def __init__(
        self,
        priors: Optional[PriorConfig] = None,
        tuning: Optional[TuningConfig] = None,
        options: Optional[SamplerOptions] = None
    ):
        """
        Initialize the sampler.

        Args:
            priors: Prior hyperparameters
            tuning: Proposal scales and caps
            options: Algorithm variants
        """
        self.priors = priors or PriorConfig()
        self.tuning = tuning or TuningConfig()
        self.options = options or SamplerOptions()
        self.schedule = SliceSchedule(self.tuning.gamma)
        self.kappa_cfg = KappaMoveConfig(
            m=self.tuning.m,
            prior_sd=math.sqrt(self.priors.sigma_kappa2),
            tails=self.options.kappa_tails,
        )
        self.acceptance = AcceptanceTracker()
        self.logger = setup_logger(self.__class__.__name__)

    @classmethod
    def from_config(cls, config: Config) -> "BaseSampler":
        return cls(config.priors, config.tuning, config.options)

    @property
    def mu_sd(self) -> float:
        return math.sqrt(self.priors.sigma_mu2)

    # ------------------------------------------------------------------
    # Interface

    @abstractmethod
    def sweep(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> ChainState:
        """
        Run one full sweep.

        Args:
            state: Current state (updated in place)
            data: (n, dim) observations
            rng: Random generator

        Returns:
            The updated state
        """
        pass

    @abstractmethod
    def log_likelihood(self, state: ChainState, data: np.ndarray) -> float:
        """Log density of the data (and latent x where kept) given the state."""
        pass

    @abstractmethod
    def regenerate_data(self, state: ChainState, rng: np.random.Generator) -> np.ndarray:
        """Simulate data from its conditional given the state."""
        pass

    def _initial_latent(self, state: ChainState, data: np.ndarray, rng: np.random.Generator) -> Optional[np.ndarray]:
        return None

    def _prior_latent(self, n: int, rho: float, rng: np.random.Generator) -> Optional[np.ndarray]:
        return None

    def _prior_rho(self, rng: np.random.Generator) -> float:
        return 0.0

    # ------------------------------------------------------------------
    # Initialization

    def check_data(self, data: np.ndarray) -> np.ndarray:
        data = np.asarray(data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[1] != self.dim:
            raise DataError(f"{self.model_name} expects {self.dim} column(s), got shape {data.shape}")
        if len(data) == 0:
            raise DataError("no observations")
        if not np.all(np.isfinite(data)):
            raise DataError("observations must be finite")
        return data

    def initial_state(self, data: np.ndarray, rng: np.random.Generator) -> ChainState:
        """
        Starting state: kappa at the sample median, every observation in
        component 1, mu_1 from its prior, c = 1 and M = 1.

        Raises:
            NumericalError: The likelihood is not finite at the starting state
        """
        data = self.check_data(data)
        n = len(data)
        mu1 = rng.normal(0.0, self.mu_sd, size=(1, self.dim))
        mu1 = np.where(mu1 == 0.0, self.mu_sd, mu1)
        d = np.zeros(n, dtype=np.int64)
        u = sample_slices(d, self.schedule, rng)
        alloc = AllocationState(d=d, u=u, schedule=self.schedule)
        N = alloc.N
        state = self.state_class(
            sticks=update_sticks(alloc.counts(N), 1.0, N, rng),
            alloc=alloc,
            mus=mu1,
            c=np.ones(self.dim),
            kappa=np.array([initial_kappa(data[:, l]) for l in range(self.dim)]),
            rho=self._prior_rho(rng) if self.options.fixed_rho is None else self.options.fixed_rho,
        )
        state.resize(N, self.priors.sigma_mu2, rng)
        state.x = self._initial_latent(state, data, rng)

        log_lik = self.log_likelihood(state, data)
        if not np.isfinite(log_lik):
            raise NumericalError(
                f"log-likelihood is {log_lik} at the initial state "
                f"(kappa={state.kappa.tolist()}, mu_1={mu1.ravel().tolist()})"
            )
        self.logger.debug(f"Initial state: kappa={state.kappa.tolist()}, N={N}, log-lik={log_lik:.4g}")
        return state

    def draw_prior_state(self, n: int, rng: np.random.Generator) -> ChainState:
        """Draw a full state (parameters, allocations, slices, latent x) from the prior."""
        p = self.priors
        tiny = np.finfo(float).tiny
        M = max(rng.gamma(p.alpha_M, 1.0 / p.beta_M), tiny)
        c = np.maximum(rng.gamma(p.alpha_c, 1.0 / p.beta_c, size=self.dim), tiny)
        kappa = rng.normal(0.0, math.sqrt(p.sigma_kappa2), size=self.dim)
        rho = self._prior_rho(rng) if self.options.fixed_rho is None else self.options.fixed_rho

        sticks = StickState(v=np.zeros(0), M=M)
        d = np.array([draw_component(sticks, rng) for _ in range(n)], dtype=np.int64)
        u = sample_slices(d, self.schedule, rng)
        alloc = AllocationState(d=d, u=u, schedule=self.schedule)
        size = max(sticks.size, alloc.N)
        sticks.extend(size, rng)
        mus = rng.normal(0.0, self.mu_sd, size=(size, self.dim))
        state = self.state_class(sticks=sticks, alloc=alloc, mus=mus, c=c, kappa=kappa, rho=rho)
        state.x = self._prior_latent(n, rho, rng)
        return state

    # ------------------------------------------------------------------
    # Shared sweep steps

    def update_slices(self, state: ChainState, rng: np.random.Generator):
        """u_i ~ U(0, xi_{d_i})."""
        state.alloc.u = sample_slices(state.alloc.d, self.schedule, rng)

    def update_concentration(self, state: ChainState, rng: np.random.Generator):
        """M from the configured update, then the sticks (and the component count) to N."""
        alloc = state.alloc
        if self.options.m_update == "sticks":
            M = update_M_given_sticks(state.sticks.log1m_v[:alloc.D], self.priors.alpha_M, self.priors.beta_M, rng)
        else:
            M = update_M(
                state.n_clusters, len(alloc.d), state.sticks.M,
                self.priors.alpha_M, self.priors.beta_M, rng, method=self.options.m_update
            )
        N = max(alloc.N, alloc.D)
        state.sticks = update_sticks(alloc.counts(N), M, N, rng)
        state.resize(N, self.priors.sigma_mu2, rng)

    def update_mus(
        self,
        state: ChainState,
        l: int,
        log_lik: LogLik,
        rng: np.random.Generator,
        components: Optional[np.ndarray] = None
    ):
        """
        Random-walk MH for the means of dimension ``l``; empty components are
        drawn from the N(0, sigma_mu2) prior.

        Occupied components are updated simultaneously; their conditionals
        are independent given the allocations.
        """
        size = state.n_components
        counts = state.alloc.counts(size)
        if components is None:
            components = np.arange(size)
        components = np.asarray(components, dtype=np.int64)
        empty = components[counts[components] == 0]
        occupied = components[counts[components] > 0]

        state.mus[empty, l] = rng.normal(0.0, self.mu_sd, size=len(empty))
        if len(occupied) == 0:
            return

        current = state.mus[:, l].copy()
        proposal = current[occupied] + self.tuning.h_mu * rng.standard_normal(len(occupied))
        zero = proposal == 0.0
        mu_star = current.copy()
        mu_star[occupied] = np.where(zero, current[occupied], proposal)

        d = state.alloc.d
        idx = np.flatnonzero(np.isin(d, occupied))
        comps = d[idx]
        with np.errstate(invalid="ignore"):
            diff = log_lik(idx, mu_star[comps]) - log_lik(idx, current[comps])
        log_q = np.bincount(comps, weights=diff, minlength=size)[occupied]
        log_q += -(mu_star[occupied] ** 2 - current[occupied] ** 2) / (2.0 * self.priors.sigma_mu2)
        log_q = np.where(zero | np.isnan(log_q), -np.inf, log_q)

        accept = np.log(rng.uniform(size=len(occupied))) < log_q
        state.mus[occupied[accept], l] = proposal[accept]
        self.acceptance.record("mu", accept.sum(), len(occupied))

    def update_mu(self, j: int, state: ChainState, l: int, log_lik: LogLik, rng: np.random.Generator):
        """Single-component version of ``update_mus``."""
        self.update_mus(state, l, log_lik, rng, components=np.array([j]))

    def gibbs_c(self, y: np.ndarray, x: np.ndarray, mu: np.ndarray, kappa: float, rng: np.random.Generator) -> float:
        """
        c ~ Gamma(n/2 + alpha_c, rate beta_c + 1/2 sum ((x_i/(y_i - kappa) - mu_i)/mu_i)^2).

        Args:
            y, x, mu: Observations, latent uniforms and component means (aligned)
        """
        t = np.asarray(y, dtype=float) - kappa
        if np.any(t == 0):
            raise DomainError("an observation equals kappa; the latent representation is undefined")
        z = (np.asarray(x) / t - mu) / mu
        shape = 0.5 * len(t) + self.priors.alpha_c
        rate = self.priors.beta_c + 0.5 * float(np.sum(z * z))
        return max(rng.gamma(shape, 1.0 / rate), np.finfo(float).tiny)

    def update_allocations(self, state: ChainState, log_kernel: np.ndarray, rng: np.random.Generator):
        """Draw every d_i from (w_j/xi_j) f(y_i | j), j <= N_i, given the (n, L) log-kernel matrix."""
        d, degenerate = sample_allocations(
            log_kernel, state.sticks.w, state.alloc.N_i, self.schedule, rng, state.alloc.d
        )
        if np.any(degenerate):
            self.logger.warning(
                f"Allocation pmf underflowed for {int(degenerate.sum())} observation(s); kept their current component"
            )
        state.alloc.d = d

    def alloc_terms(self, state: ChainState, extra: Optional[LogAlloc] = None) -> LogAlloc:
        """Slice indicator plus log w_j - log xi_j per observation, optionally with more terms."""
        size = state.n_components
        with np.errstate(divide="ignore"):
            log_w = np.log(state.sticks.w[:size])
        log_xi = self.schedule.log_xi(size)
        N_i = state.alloc.N_i

        def terms(idx: np.ndarray, comps: np.ndarray) -> np.ndarray:
            base = np.where(comps < N_i[idx], log_w[comps] - log_xi[comps], -np.inf)
            if extra is not None:
                base = base + extra(idx, comps)
            return base

        return terms

    def update_kappa(
        self,
        state: ChainState,
        l: int,
        y: np.ndarray,
        log_kernel: LogKernel,
        rng: np.random.Generator,
        extra: Optional[LogAlloc] = None
    ) -> Tuple[bool, np.ndarray]:
        """
        Joint (kappa_l, d) move.

        Returns:
            (accepted, indices of observations whose allocation changed)
        """
        proposal = propose_kappa_move(
            y, float(state.kappa[l]), state.alloc.d, log_kernel, self.alloc_terms(state, extra), self.kappa_cfg, rng
        )
        if proposal is None:
            return False, np.zeros(0, dtype=np.int64)
        accepted = bool(np.log(rng.uniform()) < proposal.log_q)
        self.acceptance.record("kappa", accepted)
        if not np.isfinite(proposal.log_q) and proposal.offset != 0:
            self.logger.debug(f"kappa move to interval {proposal.interval} rejected outright")
        if not accepted:
            return False, np.zeros(0, dtype=np.int64)
        state.kappa[l] = proposal.kappa
        state.alloc.d = proposal.d
        return True, proposal.changed
