"""
Order-statistics move for the mode location kappa with joint reassignment
of the observations kappa crosses.

Interval h is the gap between the h-th and (h+1)-th order statistics, so
kappa lies in interval h when exactly h observations fall below it. A move
picks a new interval h' = h + s inside the window [h - m, h + m], draws
kappa* inside it and hands every crossed observation the allocation of the
nearest observation on the side it left. The reverse proposal exists only
when the reverse reassignment restores the current allocations.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.stats import norm, truncnorm

from src.utils.errors import DomainError

# log f(y_i | component, kappa) for observation indices and 0-based components
LogKernel = Callable[[np.ndarray, np.ndarray, float], np.ndarray]
# allocation terms that do not involve kappa (slice indicator, log w - log xi, other dimensions)
LogAlloc = Callable[[np.ndarray, np.ndarray], np.ndarray]

ZERO_LENGTH = 1e-12


@dataclass(frozen=True)
class KappaMoveConfig:
    """
    Attributes:
        m: Half-width of the interval window
        prior_sd: Standard deviation of the N(0, prior_sd^2) prior on kappa
        tails: Admit the two unbounded end intervals, drawing kappa* from the
            prior truncated to them
    """

    m: int = 3
    prior_sd: float = 100.0
    tails: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"kappa window m must be >= 1, got {self.m}")
        if not self.prior_sd > 0:
            raise DomainError(f"prior_sd must be positive, got {self.prior_sd}")


@dataclass(frozen=True)
class KappaProposal:
    """A proposed (kappa*, d*) with its log acceptance ratio."""

    kappa: float
    d: np.ndarray
    log_q: float
    interval: int
    offset: int
    changed: np.ndarray

    @property
    def acceptance_probability(self) -> float:
        return 1.0 if self.log_q >= 0 else math.exp(self.log_q)


def interval_index(y_sorted: np.ndarray, kappa: float) -> int:
    """Number of observations strictly below kappa."""
    return int(np.searchsorted(y_sorted, kappa, side="left"))


def admissible_range(n: int, tails: bool) -> Tuple[int, int]:
    return (0, n) if tails else (1, n - 1)


def feasible_offsets(h: int, n: int, cfg: KappaMoveConfig) -> np.ndarray:
    """Intervals reachable from h: the window clipped to the admissible range."""
    lo, hi = admissible_range(n, cfg.tails)
    return np.arange(max(lo, h - cfg.m), min(hi, h + cfg.m) + 1)


def interval_bounds(y_sorted: np.ndarray, h: int) -> Tuple[float, float]:
    lower = -np.inf if h == 0 else float(y_sorted[h - 1])
    upper = np.inf if h == len(y_sorted) else float(y_sorted[h])
    return lower, upper


def _interval_logpdf(kappa: float, lower: float, upper: float, cfg: KappaMoveConfig) -> float:
    """log density of the kappa proposal inside one interval."""
    if np.isfinite(lower) and np.isfinite(upper):
        return -math.log(max(upper - lower, ZERO_LENGTH))
    sd = cfg.prior_sd
    return float(truncnorm.logpdf(kappa, lower / sd, upper / sd, scale=sd))


def _draw_in_interval(
    lower: float,
    upper: float,
    cfg: KappaMoveConfig,
    rng: np.random.Generator
) -> float:
    if np.isfinite(lower) and np.isfinite(upper):
        return float(rng.uniform(lower, upper))
    sd = cfg.prior_sd
    return float(truncnorm.rvs(lower / sd, upper / sd, scale=sd, random_state=rng))


def reassign(d_sorted: np.ndarray, h: int, h_new: int) -> np.ndarray:
    """
    Allocations after kappa moves from interval h to h_new (sorted order).

    Observations crossed while moving up take the allocation of the h-th
    order statistic; moving down they take the (h+1)-th. Without such a
    neighbour (end intervals) the crossed allocations are left alone.
    """
    out = d_sorted.copy()
    if h_new > h and h >= 1:
        out[h:h_new] = d_sorted[h - 1]
    elif h_new < h and h < len(d_sorted):
        out[h_new:h] = d_sorted[h]
    return out


def evaluate_kappa_move(
    y: np.ndarray,
    kappa: float,
    d: np.ndarray,
    h_new: int,
    kappa_new: float,
    log_kernel: LogKernel,
    log_alloc: LogAlloc,
    cfg: KappaMoveConfig
) -> KappaProposal:
    """
    Acceptance ratio of a fixed (interval, kappa*) choice from (kappa, d).

    Args:
        y: Observations of the dimension kappa belongs to (original order)
        kappa: Current mode location
        d: Current 0-based allocations
        h_new: Target interval
        kappa_new: Proposed location inside ``h_new``
        log_kernel: Per-observation log kernel terms of this dimension
        log_alloc: Per-observation allocation terms free of kappa
        cfg: Move configuration

    Returns:
        KappaProposal; ``log_q`` is -inf when the reverse move cannot
        restore ``d`` or the target is zero.
    """
    n = len(y)
    order = np.argsort(y, kind="stable")
    y_sorted = y[order]
    lo, hi = admissible_range(n, cfg.tails)
    h = min(max(interval_index(y_sorted, kappa), lo), hi)

    d_sorted = d[order]
    d_new_sorted = reassign(d_sorted, h, h_new)
    d_new = np.empty_like(d)
    d_new[order] = d_new_sorted
    changed = np.flatnonzero(d_new != d)

    lower, upper = interval_bounds(y_sorted, h_new)
    reject = KappaProposal(kappa_new, d_new, -np.inf, h_new, h_new - h, changed)
    if not lower < upper or np.any(y_sorted == kappa_new):
        return reject
    if not np.array_equal(reassign(d_new_sorted, h_new, h), d_sorted):
        return reject

    idx = np.arange(n)
    with np.errstate(invalid="ignore"):
        new_terms = np.sum(log_kernel(idx, d_new, kappa_new))
        old_terms = np.sum(log_kernel(idx, d, kappa))
        if len(changed):
            new_terms += np.sum(log_alloc(changed, d_new[changed]))
            old_terms += np.sum(log_alloc(changed, d[changed]))
    if not np.isfinite(new_terms):
        return reject

    log_target = (
        new_terms - old_terms
        + norm.logpdf(kappa_new, scale=cfg.prior_sd) - norm.logpdf(kappa, scale=cfg.prior_sd)
    )
    cur_lower, cur_upper = interval_bounds(y_sorted, h)
    log_forward = -math.log(len(feasible_offsets(h, n, cfg))) + _interval_logpdf(kappa_new, lower, upper, cfg)
    log_reverse = -math.log(len(feasible_offsets(h_new, n, cfg))) + _interval_logpdf(kappa, cur_lower, cur_upper, cfg)
    log_q = float(log_target + log_reverse - log_forward)
    if np.isnan(log_q):
        # current state outside the support
        log_q = np.inf
    return KappaProposal(kappa_new, d_new, log_q, h_new, h_new - h, changed)


def propose_kappa_move(
    y: np.ndarray,
    kappa: float,
    d: np.ndarray,
    log_kernel: LogKernel,
    log_alloc: LogAlloc,
    cfg: KappaMoveConfig,
    rng: np.random.Generator
) -> Optional[KappaProposal]:
    """
    Draw an interval offset and kappa*, returning the proposal with its ratio.

    Returns None when no move is possible (fewer than two observations
    without the end intervals).
    """
    n = len(y)
    if n == 0 or (n < 2 and not cfg.tails):
        return None
    y_sorted = np.sort(y, kind="stable")
    lo, hi = admissible_range(n, cfg.tails)
    h = min(max(interval_index(y_sorted, kappa), lo), hi)
    h_new = int(rng.choice(feasible_offsets(h, n, cfg)))
    lower, upper = interval_bounds(y_sorted, h_new)
    if lower < upper:
        kappa_new = _draw_in_interval(lower, upper, cfg, rng)
    else:
        kappa_new = lower
    return evaluate_kappa_move(y, kappa, d, h_new, kappa_new, log_kernel, log_alloc, cfg)
