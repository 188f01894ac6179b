"""
Bivariate Gaussian copula used to couple the latent uniforms across dimensions.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import ndtr, ndtri

from src.utils.errors import DomainError

# Samplers clamp into this range before taking Phi^-1; densities never clamp.
UNIT_EPS = 1e-15


@dataclass(frozen=True)
class CopulaParams:
    """Copula correlation; restricted to [0, 1) for inference."""

    rho: float

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise DomainError(f"rho must lie in [0, 1), got {self.rho}")


def _check_rho(rho: float):
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (-1, 1), got {rho}")


def clamp_unit(x: ArrayLike) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=float), UNIT_EPS, 1.0 - UNIT_EPS)


def copula_logpdf(x1: ArrayLike, x2: ArrayLike, rho: ArrayLike) -> Union[float, np.ndarray]:
    """
    log c(x1, x2; rho) = -0.5 log(1 - rho^2) - (rho^2 (q1^2 + q2^2) - 2 rho q1 q2) / (2 (1 - rho^2)).

    Broadcasting, no validation.
    """
    q1 = ndtri(np.asarray(x1, dtype=float))
    q2 = ndtri(np.asarray(x2, dtype=float))
    rho = np.asarray(rho, dtype=float)
    one_minus = 1.0 - rho * rho
    value = -0.5 * np.log(one_minus) - (rho * rho * (q1 * q1 + q2 * q2) - 2.0 * rho * q1 * q2) / (2.0 * one_minus)
    return float(value) if np.ndim(value) == 0 else value


def copula_density(x1: float, x2: float, rho: float) -> float:
    """Gaussian copula density at an interior point of the unit square."""
    _check_rho(rho)
    for value in (x1, x2):
        if not 0.0 < value < 1.0:
            raise DomainError(f"copula arguments must be interior to (0, 1), got {value}")
    return math.exp(copula_logpdf(x1, x2, rho))


def copula_mode_given(x_other: ArrayLike, rho: float) -> Union[float, np.ndarray]:
    """
    Maximizer in one coordinate with the other fixed: Phi(Phi^-1(x_other) / rho).

    The exponent -(rho^2 (q^2 + q_other^2) - 2 rho q q_other) / (2 (1 - rho^2))
    is stationary at q = q_other / rho. Not to be confused with the conditional
    median Phi(rho Phi^-1(x_other)). At rho = 0 the density is flat and 0.5 is
    returned.
    """
    _check_rho(rho)
    q_other = ndtri(np.asarray(x_other, dtype=float))
    if rho == 0.0:
        value = np.full_like(q_other, 0.5)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            value = ndtr(q_other / rho)
    return float(value) if np.ndim(value) == 0 else value


def copula_max_given(x_other: ArrayLike, rho: float) -> Union[float, np.ndarray]:
    """log of max_x c(x, x_other; rho) = q_other^2 / 2 - 0.5 log(1 - rho^2), and 0 at rho = 0."""
    _check_rho(rho)
    q_other = ndtri(np.asarray(x_other, dtype=float))
    if rho == 0.0:
        value = np.zeros_like(q_other)
    else:
        value = 0.5 * q_other * q_other - 0.5 * math.log(1.0 - rho * rho)
    return float(value) if np.ndim(value) == 0 else value


def sample_copula_pair(
    rho: float,
    rng: np.random.Generator,
    size: Optional[int] = None
) -> Tuple[Union[float, np.ndarray], Union[float, np.ndarray]]:
    """Draw (Phi(z1), Phi(z2)) with (z1, z2) standard bivariate normal, correlation rho."""
    _check_rho(rho)
    z1 = rng.standard_normal(size)
    z2 = rho * z1 + math.sqrt(1.0 - rho * rho) * rng.standard_normal(size)
    return ndtr(z1), ndtr(z2)


def sample_copula_conditional(
    x_given: ArrayLike,
    rho: float,
    rng: np.random.Generator
) -> Union[float, np.ndarray]:
    """Draw x2 | x1 = x_given from the Gaussian copula."""
    _check_rho(rho)
    q = ndtri(clamp_unit(x_given))
    z = rho * q + math.sqrt(1.0 - rho * rho) * rng.standard_normal(np.shape(q))
    value = ndtr(z)
    return float(value) if np.ndim(value) == 0 else value
