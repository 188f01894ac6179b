"""
Dirichlet-process mixture machinery: stick-breaking weights, slice variables,
allocations, the concentration update and predictive draws.

Component indices are 1-based in the mathematics (xi_j = exp(-gamma j),
j >= 1) and 0-based in arrays: array position k holds component j = k + 1.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from src.density.copula import sample_copula_pair
from src.density.kernel import sample_unimodal
from src.utils.errors import DomainError, NumericalError


@dataclass
class StickState:
    """
    Stick fractions v_j and the DP scale M.

    ``log1m_v`` carries log(1 - v_j) drawn in log space, so it stays finite
    when v_j rounds to 1. Built from ``v`` alone when omitted.
    """

    v: np.ndarray
    M: float
    log1m_v: Optional[np.ndarray] = None

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        if self.log1m_v is None:
            with np.errstate(divide="ignore"):
                self.log1m_v = np.log1p(-self.v)
        else:
            self.log1m_v = np.asarray(self.log1m_v, dtype=float)

    @property
    def w(self) -> np.ndarray:
        return stick_weights(self.v, self.log1m_v)

    @property
    def size(self) -> int:
        return len(self.v)

    def extend(self, length: int, rng: np.random.Generator):
        """Grow to ``length`` sticks with prior draws Beta(1, M)."""
        if length > len(self.v):
            log_v, log1m_v = sample_log_beta(1.0, self.M, rng, size=length - len(self.v))
            self.v = np.concatenate([self.v, np.exp(log_v)])
            self.log1m_v = np.concatenate([self.log1m_v, log1m_v])

    def truncate(self, length: int):
        self.v = self.v[:length]
        self.log1m_v = self.log1m_v[:length]

    def copy(self) -> "StickState":
        return StickState(v=self.v.copy(), M=self.M, log1m_v=self.log1m_v.copy())


@dataclass
class SliceSchedule:
    """Deterministic slice sequence xi_j = exp(-gamma j)."""

    gamma: float = 0.01

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    def xi(self, size: int) -> np.ndarray:
        """xi_1..xi_size as an array."""
        return np.exp(-self.gamma * np.arange(1, size + 1))

    def log_xi(self, size: int) -> np.ndarray:
        return -self.gamma * np.arange(1, size + 1)

    def available(self, u: np.ndarray) -> np.ndarray:
        """N_i = max{j : xi_j > u_i}."""
        return np.floor(-np.log(u) / self.gamma).astype(np.int64)


@dataclass
class AllocationState:
    """Component indicators (0-based) and slice variables per observation."""

    d: np.ndarray
    u: np.ndarray
    schedule: SliceSchedule = field(default_factory=SliceSchedule)

    @property
    def N_i(self) -> np.ndarray:
        return self.schedule.available(self.u)

    @property
    def N(self) -> int:
        return int(self.N_i.max()) if len(self.u) else 0

    @property
    def D(self) -> int:
        return int(self.d.max()) + 1 if len(self.d) else 0

    def counts(self, size: int) -> np.ndarray:
        return np.bincount(self.d, minlength=size)[:size] if len(self.d) else np.zeros(size, dtype=np.int64)

    def copy(self) -> "AllocationState":
        return AllocationState(d=self.d.copy(), u=self.u.copy(), schedule=self.schedule)


@dataclass(frozen=True)
class PredictiveDraw:
    """One simulated future observation."""

    y: np.ndarray
    component: int


def stick_weights(v: np.ndarray, log1m_v: Optional[np.ndarray] = None) -> np.ndarray:
    """w_1 = v_1, w_j = v_j prod_{l<j} (1 - v_l)."""
    v = np.asarray(v, dtype=float)
    if len(v) == 0:
        return v.copy()
    if log1m_v is None:
        with np.errstate(divide="ignore"):
            log1m_v = np.log1p(-v)
    remaining = np.exp(np.concatenate([[0.0], np.cumsum(log1m_v[:-1])]))
    return v * remaining


def log_gamma_variate(
    shape: ArrayLike,
    rng: np.random.Generator,
    size: Optional[Union[int, Tuple[int, ...]]] = None
) -> np.ndarray:
    """
    log G for G ~ Gamma(shape, 1), finite even when G itself underflows.

    Uses G(a) = G(a + 1) U^(1/a), so tiny shapes only enter through log U / a.
    """
    shape = np.asarray(shape, dtype=float)
    if size is None:
        size = shape.shape
    log_boosted = np.log(rng.gamma(shape + 1.0, size=size))
    return log_boosted + np.log1p(-rng.uniform(size=size)) / shape


def sample_log_beta(
    a: ArrayLike,
    b: ArrayLike,
    rng: np.random.Generator,
    size: Optional[Union[int, Tuple[int, ...]]] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """(log v, log(1 - v)) for v ~ Beta(a, b), built from two log-gamma draws."""
    if size is None:
        size = np.broadcast(np.asarray(a), np.asarray(b)).shape
    log_ga = log_gamma_variate(a, rng, size)
    log_gb = log_gamma_variate(b, rng, size)
    log_total = np.logaddexp(log_ga, log_gb)
    return log_ga - log_total, log_gb - log_total


def xi(j: int, gamma: float) -> float:
    """xi_j = exp(-gamma j) for j >= 1."""
    if j < 1:
        raise DomainError(f"component indices start at 1, got {j}")
    return math.exp(-gamma * j)


def sample_slice(d_i: int, gamma: float, rng: np.random.Generator) -> Tuple[float, int]:
    """
    u_i ~ U(0, xi_{d_i}) for a 1-based allocation d_i.

    Returns:
        (u_i, N_i) with N_i = floor(-log(u_i)/gamma) >= d_i
    """
    bound = xi(d_i, gamma)
    u = rng.uniform(0.0, bound)
    while u == 0.0:
        u = rng.uniform(0.0, bound)
    return u, int(math.floor(-math.log(u) / gamma))


def sample_slices(d: np.ndarray, schedule: SliceSchedule, rng: np.random.Generator) -> np.ndarray:
    """Vectorized slice draw for 0-based allocations."""
    bound = np.exp(-schedule.gamma * (d + 1))
    u = bound * rng.uniform(size=len(d))
    zero = u == 0.0
    while np.any(zero):
        u = np.where(zero, bound * rng.uniform(size=len(d)), u)
        zero = u == 0.0
    return u


def update_sticks(counts: np.ndarray, M: float, N: int, rng: np.random.Generator) -> StickState:
    """
    Conjugate stick update v_j ~ Beta(1 + n_j, M + sum_{l>j} n_l), j = 1..N.

    Args:
        counts: n_j per component (0-based positions; shorter than N is zero-padded)
        M: DP scale
        N: Number of sticks to draw
    """
    n = np.zeros(N, dtype=float)
    counts = np.asarray(counts, dtype=float)[:N]
    n[:len(counts)] = counts
    tail = np.concatenate([np.cumsum(n[::-1])[::-1][1:], [0.0]])
    log_v, log1m_v = sample_log_beta(1.0 + n, M + tail, rng)
    return StickState(v=np.exp(log_v), M=M, log1m_v=log1m_v)


def update_M(
    k: int,
    n: int,
    M_current: float,
    alpha_M: float,
    beta_M: float,
    rng: np.random.Generator,
    method: str = "literal"
) -> float:
    """
    Concentration update from the number of distinct allocations.

    ``literal``: nu ~ Beta(M, n), M ~ Gamma(alpha_M + k, rate beta_M - log nu).
    ``escobar_west``: eta ~ Beta(M + 1, n) and the two-component gamma mixture.
    """
    if k < 1 or n < 1:
        raise DomainError(f"update_M needs k >= 1 and n >= 1, got k={k}, n={n}")
    if method == "literal":
        log_nu, _ = sample_log_beta(M_current, n, rng)
        return _positive_gamma(alpha_M + k, beta_M - float(log_nu), rng)
    if method == "escobar_west":
        log_eta, _ = sample_log_beta(M_current + 1.0, n, rng)
        rate = beta_M - float(log_eta)
        odds = (alpha_M + k - 1.0) / (n * rate)
        shape = alpha_M + k if rng.uniform() < odds / (1.0 + odds) else alpha_M + k - 1.0
        return _positive_gamma(shape, rate, rng)
    raise DomainError(f"unknown M update '{method}'")


def update_M_given_sticks(
    log1m_v: np.ndarray,
    alpha_M: float,
    beta_M: float,
    rng: np.random.Generator
) -> float:
    """
    M | v_1..v_D ~ Gamma(alpha_M + D, rate beta_M - sum log(1 - v_j)).

    Takes log(1 - v_j) directly (``StickState.log1m_v``).
    """
    log1m_v = np.asarray(log1m_v, dtype=float)
    return _positive_gamma(alpha_M + len(log1m_v), beta_M - float(np.sum(log1m_v)), rng)


def _positive_gamma(shape: float, rate: float, rng: np.random.Generator) -> float:
    if not (math.isfinite(rate) and rate > 0.0):
        raise NumericalError(f"concentration update has rate {rate}")
    value = rng.gamma(shape, 1.0 / rate)
    # Tiny shapes can round to 0
    return max(value, np.finfo(float).tiny)


def sample_allocation(
    y_i: float,
    u_i: float,
    sticks: StickState,
    schedule: SliceSchedule,
    kernel_eval: Callable[[float, np.ndarray], np.ndarray],
    rng: np.random.Generator,
    current: int = 0
) -> Tuple[int, bool]:
    """
    Draw one allocation from P(d_i = j) proportional to (w_j/xi_j) f(y_i | j), j = 1..N_i.

    Args:
        sticks: Grown from the prior to N_i when shorter (mutated)
        kernel_eval: Returns log f(y_i | component) for 0-based component indices
        current: Allocation kept if every mass underflows

    Returns:
        (0-based allocation, degenerate flag)
    """
    n_avail = int(schedule.available(np.array([u_i]))[0])
    if n_avail < 1:
        raise DomainError(f"slice u={u_i} leaves no component available")
    sticks.extend(n_avail, rng)
    components = np.arange(n_avail)
    with np.errstate(divide="ignore"):
        log_w = np.log(sticks.w[:n_avail])
    log_mass = log_w - schedule.log_xi(n_avail) + kernel_eval(y_i, components)
    d, degenerate = _draw_from_log_masses(log_mass[None, :], rng, np.array([current]))
    return int(d[0]), bool(degenerate[0])


def sample_allocations(
    log_kernel: np.ndarray,
    weights: np.ndarray,
    N_i: np.ndarray,
    schedule: SliceSchedule,
    rng: np.random.Generator,
    current: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized allocation draw.

    Args:
        log_kernel: (n, L) matrix of log f(y_i | component j)
        weights: Stick weights, length >= L
        N_i: Available components per observation (<= L)
        current: Allocations kept for degenerate rows

    Returns:
        (allocations, degenerate-row mask)
    """
    n, size = log_kernel.shape
    if len(weights) < size:
        raise DomainError(f"{len(weights)} stick weights for {size} components")
    with np.errstate(divide="ignore"):
        log_mass = np.log(weights[:size]) - schedule.log_xi(size) + log_kernel
    log_mass = np.where(np.arange(size)[None, :] < N_i[:, None], log_mass, -np.inf)
    return _draw_from_log_masses(log_mass, rng, current)


def _draw_from_log_masses(
    log_mass: np.ndarray,
    rng: np.random.Generator,
    current: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    total = logsumexp(log_mass, axis=1, keepdims=True)
    degenerate = ~np.isfinite(total[:, 0])
    with np.errstate(invalid="ignore"):
        probs = np.exp(log_mass - np.where(np.isfinite(total), total, 0.0))
    cum = np.cumsum(probs, axis=1)
    draws = rng.uniform(size=(len(log_mass), 1)) * cum[:, -1:]
    d = np.minimum((cum <= draws).sum(axis=1), log_mass.shape[1] - 1)
    return np.where(degenerate, current, d), degenerate


def draw_component(
    sticks: StickState,
    rng: np.random.Generator
) -> int:
    """
    Component index j with probability w_j, growing the sticks from the prior
    when the uniform falls in the untruncated tail (mutates ``sticks``).
    """
    w = sticks.w
    cum = np.cumsum(w)
    target = rng.uniform()
    while len(cum) == 0 or target >= cum[-1]:
        sticks.extend(sticks.size + max(8, sticks.size // 2), rng)
        w = sticks.w
        cum = np.cumsum(w)
    return int(np.searchsorted(cum, target, side="right"))


def predictive_draw(
    state,
    sigma_mu2: float,
    rng: np.random.Generator
) -> PredictiveDraw:
    """
    Simulate one future observation from a posterior state.

    ``state`` provides ``sticks``, ``mus`` (L, dim), ``c`` (dim,), ``kappa``
    (dim,) and ``rho``. Components beyond the stored ones get sticks and
    means from the prior; the state itself is left untouched.
    """
    sticks = state.sticks.copy()
    j = draw_component(sticks, rng)
    mus = np.asarray(state.mus, dtype=float)
    dim = mus.shape[1]
    if j < len(mus):
        mu = mus[j]
    else:
        mu = rng.normal(0.0, math.sqrt(sigma_mu2), size=dim)
    if dim == 1:
        x = rng.uniform(size=1)
    else:
        x1, x2 = sample_copula_pair(float(state.rho), rng)
        x = np.array([x1, x2])
    y = sample_unimodal(mu, state.c, state.kappa, rng, x=x)
    return PredictiveDraw(y=np.atleast_1d(y), component=j)
