"""
Adaptive rejection sampling for log-concave densities on an interval.

The envelope is the tangent hull of log h at the support points (upper bound)
together with the chords between them (squeeze). Rejected proposals are
added as support points, so the hull tightens as sampling proceeds.
"""

from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from src.utils.errors import BoundViolationError, DomainError, NumericalError

# Returns (log h(x), d/dx log h(x)) for an array of points
LogDensity = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

# Slack allowed between log h and the tangent hull before concavity is declared broken
HULL_TOLERANCE = 1e-9


class Envelope:
    """Piecewise linear upper and lower bounds of a concave log density."""

    def __init__(self, x: np.ndarray, h: np.ndarray, dh: np.ndarray, lower: float, upper: float):
        order = np.argsort(x)
        self.x = np.asarray(x, dtype=float)[order]
        self.h = np.asarray(h, dtype=float)[order]
        self.dh = np.asarray(dh, dtype=float)[order]
        self.lower = lower
        self.upper = upper

    def z(self) -> np.ndarray:
        """Tangent intersections, bracketed by the interval ends."""
        x, h, dh = self.x, self.h, self.dh
        denom = dh[:-1] - dh[1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (h[1:] - h[:-1] + x[:-1] * dh[:-1] - x[1:] * dh[1:]) / denom
        parallel = ~np.isfinite(z) | (np.abs(denom) < 1e-300)
        z = np.where(parallel, 0.5 * (x[:-1] + x[1:]), z)
        z = np.clip(z, x[:-1], x[1:])
        return np.concatenate(([self.lower], z, [self.upper]))

    def u(self, value: float) -> float:
        """Upper hull at ``value``."""
        j = int((value > self.z()[1:-1]).sum())
        return float(self.h[j] + self.dh[j] * (value - self.x[j]))

    def l(self, value: float) -> float:
        """Squeeze at ``value``; -inf outside the support points."""
        j = int((value > self.x).sum())
        if j == 0 or j == len(self.x):
            return -np.inf
        j -= 1
        span = self.x[j + 1] - self.x[j]
        return float(((self.x[j + 1] - value) * self.h[j] + (value - self.x[j]) * self.h[j + 1]) / span)

    def insert(self, value: float, h: float, dh: float):
        j = int((value > self.x).sum())
        self.x = np.insert(self.x, j, value)
        self.h = np.insert(self.h, j, h)
        self.dh = np.insert(self.dh, j, dh)

    def log_masses(self) -> np.ndarray:
        """log of the integral of exp(upper hull) over each piece."""
        z = self.z()
        width = z[1:] - z[:-1]
        with np.errstate(invalid="ignore"):
            u_left = self.h + self.dh * (z[:-1] - self.x)
            u_right = self.h + self.dh * (z[1:] - self.x)
            a = self.dh * width
        out = np.empty_like(a)
        for k in range(len(a)):
            if width[k] <= 0:
                out[k] = -np.inf
            elif abs(a[k]) < 1e-12:
                out[k] = u_left[k] + np.log(width[k])
            elif a[k] > 0:
                out[k] = u_right[k] + np.log1p(-np.exp(-a[k])) - np.log(self.dh[k])
            else:
                out[k] = u_left[k] + np.log(-np.expm1(a[k])) - np.log(-self.dh[k])
        return out

    def sample(self, rng: np.random.Generator) -> float:
        log_m = self.log_masses()
        probs = np.exp(log_m - logsumexp(log_m))
        j = min(int((rng.uniform() > np.cumsum(probs)).sum()), len(probs) - 1)

        z = self.z()
        left, right = z[j], z[j + 1]
        slope = self.dh[j]
        v = rng.uniform()
        a = slope * (right - left)
        if abs(a) < 1e-12:
            return float(left + v * (right - left))
        if slope > 0:
            value = right + np.log(v + (1.0 - v) * np.exp(-a)) / slope
        else:
            value = left + np.log1p(v * np.expm1(a)) / slope
        return float(np.clip(value, left, right))


class AdaptiveRejectionSampler:
    """
    Sampler for a log-concave density on [lower, upper].

    Args:
        log_density: Callable returning (log h, d log h) at an array of points
        abscissae: Initial support points inside the interval
        lower: Left end (may be -inf only if the leftmost slope is positive)
        upper: Right end (may be +inf only if the rightmost slope is negative)
        max_iter: Proposals allowed per draw
    """

    def __init__(
        self,
        log_density: LogDensity,
        abscissae: Sequence[float],
        lower: float = -np.inf,
        upper: float = np.inf,
        max_iter: int = 1000
    ):
        points = np.unique(np.asarray(abscissae, dtype=float))
        if len(points) == 0:
            raise DomainError("ARS needs at least one support point")
        if np.any(points <= lower) or np.any(points > upper):
            raise DomainError(f"support points must lie in ({lower}, {upper}]")
        h, dh = log_density(points)
        if not np.all(np.isfinite(h)):
            raise NumericalError("log density is not finite at the initial support points")
        if not np.isfinite(lower) and dh[0] <= 0:
            raise DomainError("unbounded left end needs a positive leftmost slope")
        if not np.isfinite(upper) and dh[-1] >= 0:
            raise DomainError("unbounded right end needs a negative rightmost slope")

        self.log_density = log_density
        self.hull = Envelope(points, h, dh, lower, upper)
        self.max_iter = max_iter
        self.n_proposals = 0

    def draw(self, rng: np.random.Generator) -> float:
        """One exact draw; raises NumericalError if ``max_iter`` proposals all fail."""
        for _ in range(self.max_iter):
            value = self.hull.sample(rng)
            self.n_proposals += 1
            upper = self.hull.u(value)
            log_w = np.log(rng.uniform())
            if log_w <= self.hull.l(value) - upper:
                return value

            h, dh = (float(a[0]) for a in self.log_density(np.array([value])))
            if h > upper + HULL_TOLERANCE * max(1.0, abs(upper)):
                raise BoundViolationError(
                    f"log density {h:.6g} exceeds the tangent hull {upper:.6g} at {value:.6g}; not log-concave"
                )
            if log_w <= h - upper:
                return value
            if np.isfinite(h) and np.isfinite(dh):
                self.hull.insert(value, h, dh)
        raise NumericalError(f"adaptive rejection sampling made no draw in {self.max_iter} proposals")

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        return np.array([self.draw(rng) for _ in range(size)])
