"""
Closed-form unimodal kernel built from Y = kappa + X/Z.

X is uniform on [0, 1] and Z is normal with mean mu and variance mu^2/c, so the
density of a single component is

    f(y | mu, c, kappa) = | int_0^{1/(y - kappa)} s N(ds | mu, sigma^2) |,  sigma = |mu|/sqrt(c),

which is maximal at y = kappa and non-increasing in |y - kappa| on each side.
Keeping X as a latent variable gives the joint density

    f(y, x | mu, c, kappa) = x/(y - kappa)^2 * N(x/(y - kappa) | mu, sigma^2),   0 <= x <= 1,

whose integral over x is the closed form above.

The array functions (``unimodal_pdf`` and friends) broadcast over their
arguments and are what the samplers call; the ``KernelParams`` wrappers are
the scalar API.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import ndtr

from src.utils.errors import DomainError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Below this |xi|/sigma the closed form loses digits to cancellation and the
# integral is evaluated by Gauss-Legendre quadrature instead.
_SMALL_STEP = 1e-2
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)

Number = Union[float, np.ndarray]


@dataclass(frozen=True)
class KernelParams:
    """
    Parameters of one mixture component.

    Attributes:
        mu: Mean of Z (nonzero)
        c: Squared inverse coefficient of variation of Z, c = (mu/sigma)^2
        kappa: Mode location
    """

    mu: float
    c: float
    kappa: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.c) and math.isfinite(self.kappa)):
            raise DomainError(f"Kernel parameters must be finite: {self}")
        if self.mu == 0.0:
            raise DomainError("mu = 0 is excluded: sigma = |mu|/sqrt(c) degenerates")
        if self.c <= 0.0:
            raise DomainError(f"c must be positive, got {self.c}")

    @property
    def sigma(self) -> float:
        return abs(self.mu) / math.sqrt(self.c)


def _scalar_or_array(value: np.ndarray) -> Number:
    return float(value) if np.ndim(value) == 0 else value


def std_normal_pdf(z: ArrayLike) -> np.ndarray:
    """phi(z); exponents below the double range evaluate to 0."""
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        return INV_SQRT_2PI * np.exp(-0.5 * z * z)


def _gl_partial_mean(xi: np.ndarray, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """int_0^xi s N(s | mu, sigma^2) ds by 12-point Gauss-Legendre (short intervals only)."""
    half = 0.5 * xi[..., None]
    s = half * (1.0 + _GL_NODES)
    z = (s - mu[..., None]) / sigma[..., None]
    integrand = s * std_normal_pdf(z) / sigma[..., None]
    return np.sum(_GL_WEIGHTS * integrand, axis=-1) * half[..., 0]


def partial_mean_integral(xi: ArrayLike, mu: ArrayLike, sigma: ArrayLike) -> Number:
    """
    Absolute partial first moment of N(mu, sigma^2) between 0 and xi.

    Returns |mu [Phi((xi - mu)/sigma) - Phi(-mu/sigma)] + sigma [phi(-mu/sigma) - phi((xi - mu)/sigma)]|,
    which equals |int_0^xi s N(ds | mu, sigma^2)| (signed interval for xi < 0).
    ``xi`` may be +/-inf.

    Args:
        xi: Upper integration limit
        mu: Normal mean (finite)
        sigma: Normal standard deviation (> 0)

    Returns:
        Nonnegative value, scalar for scalar inputs
    """
    xi, mu, sigma = np.broadcast_arrays(
        np.asarray(xi, dtype=float), np.asarray(mu, dtype=float), np.asarray(sigma, dtype=float)
    )
    if not np.all(np.isfinite(mu)):
        raise DomainError("mu must be finite")
    if np.any(~(sigma > 0)):
        raise DomainError("sigma must be positive")

    b = -mu / sigma
    with np.errstate(invalid="ignore", over="ignore"):
        a = (xi - mu) / sigma
    # Difference of normal CDFs taken on the tail where it is accurate
    cdf_diff = np.where(b > 0, ndtr(-b) - ndtr(-a), ndtr(a) - ndtr(b))
    value = mu * cdf_diff + sigma * (std_normal_pdf(b) - std_normal_pdf(a))

    small = np.isfinite(xi) & (np.abs(xi) < _SMALL_STEP * sigma)
    if np.any(small):
        value = np.where(small, _gl_partial_mean(np.where(small, xi, 0.0), mu, sigma), value)
    return _scalar_or_array(np.abs(value))


def unimodal_pdf(y: ArrayLike, mu: ArrayLike, c: ArrayLike, kappa: ArrayLike) -> Number:
    """
    Kernel density f(y | mu, c, kappa), broadcasting over all arguments.

    At y = kappa the one-sided limit on the side where Z concentrates is
    returned (right limit for mu > 0, left limit for mu < 0).
    """
    y, mu, c, kappa = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(mu, dtype=float),
        np.asarray(c, dtype=float), np.asarray(kappa, dtype=float)
    )
    if np.any(mu == 0):
        raise DomainError("mu = 0 is excluded from the kernel")
    t = y - kappa
    with np.errstate(divide="ignore"):
        xi = np.where(t == 0, np.sign(mu) * np.inf, 1.0 / np.where(t == 0, 1.0, t))
    return partial_mean_integral(xi, mu, np.abs(mu) / np.sqrt(c))


def unimodal_logpdf(y: ArrayLike, mu: ArrayLike, c: ArrayLike, kappa: ArrayLike) -> Number:
    """log f(y | mu, c, kappa); -inf where the density underflows."""
    with np.errstate(divide="ignore"):
        return _scalar_or_array(np.log(unimodal_pdf(y, mu, c, kappa)))


def kernel_density(y: ArrayLike, params: KernelParams) -> Number:
    """Density of kappa + X/Z at y for one component."""
    return unimodal_pdf(y, params.mu, params.c, params.kappa)


def latent_logpdf(y: ArrayLike, x: ArrayLike, mu: ArrayLike, c: ArrayLike, kappa: ArrayLike) -> Number:
    """
    log of the latent joint density x/(y-kappa)^2 N(x/(y-kappa) | mu, mu^2/c).

    Broadcasting, no validation: callers guarantee y != kappa and 0 <= x <= 1.
    """
    y, x, mu, c, kappa = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(x, dtype=float), np.asarray(mu, dtype=float),
        np.asarray(c, dtype=float), np.asarray(kappa, dtype=float)
    )
    t = y - kappa
    sigma = np.abs(mu) / np.sqrt(c)
    z = (x / t - mu) / sigma
    with np.errstate(divide="ignore"):
        value = np.log(x) - 2.0 * np.log(np.abs(t)) - 0.5 * z * z - np.log(sigma) - LOG_SQRT_2PI
    return _scalar_or_array(value)


def latent_joint_density(y: float, x: float, params: KernelParams) -> float:
    """
    Joint density of (y, x) for one component, including the 1/(sigma sqrt(2 pi)) constant.

    Integrating over x in [0, 1] gives ``kernel_density(y, params)``.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if y == params.kappa:
        raise DomainError("latent density is undefined at the mode y = kappa")
    return float(np.exp(latent_logpdf(y, x, params.mu, params.c, params.kappa)))


def latent_argmax(y: ArrayLike, mu: ArrayLike, c: ArrayLike, kappa: ArrayLike) -> Number:
    """
    Maximizer over (0, 1] of the latent density in x, broadcasting.

    The stationary point of log x - (x/t - mu)^2 c/(2 mu^2) with t = y - kappa is
    mu t/2 + |t| |mu| sqrt(1/c + 1/4), always positive; it is clamped at 1.
    """
    t = np.asarray(y, dtype=float) - np.asarray(kappa, dtype=float)
    mu = np.asarray(mu, dtype=float)
    root = 0.5 * mu * t + np.abs(t) * np.abs(mu) * np.sqrt(1.0 / np.asarray(c, dtype=float) + 0.25)
    return _scalar_or_array(np.minimum(1.0, root))


def latent_maximizer(y: float, params: KernelParams) -> float:
    """x-hat maximizing ``latent_joint_density(y, x, params)`` over (0, 1]."""
    if y == params.kappa:
        raise DomainError("latent density is undefined at the mode y = kappa")
    return float(latent_argmax(y, params.mu, params.c, params.kappa))


def sample_unimodal(
    mu: ArrayLike,
    c: ArrayLike,
    kappa: ArrayLike,
    rng: np.random.Generator,
    size: Optional[Union[int, Sequence[int]]] = None,
    x: Optional[ArrayLike] = None
) -> Number:
    """
    Draw kappa + x/z with z ~ N(mu, mu^2/c); x ~ U(0, 1) unless supplied.

    Exact zeros of z are redrawn.
    """
    mu = np.asarray(mu, dtype=float)
    if size is None:
        size = np.broadcast_shapes(mu.shape, np.shape(c), np.shape(kappa), np.shape(x) if x is not None else ())
    sigma = np.abs(mu) / np.sqrt(np.asarray(c, dtype=float))
    if x is None:
        x = rng.uniform(size=size)
    z = rng.normal(np.broadcast_to(mu, size), np.broadcast_to(sigma, size))
    zero = z == 0.0
    while np.any(zero):
        z = np.where(zero, rng.normal(np.broadcast_to(mu, size), np.broadcast_to(sigma, size)), z)
        zero = z == 0.0
    return _scalar_or_array(np.asarray(kappa, dtype=float) + x / z)


def sample_kernel(params: KernelParams, rng: np.random.Generator, size: Optional[int] = None) -> Number:
    """Draw from a single component."""
    return sample_unimodal(params.mu, params.c, params.kappa, rng, size=size)


def mixture_density(
    y: ArrayLike,
    weights: ArrayLike,
    mus: ArrayLike,
    c: float,
    kappa: float
) -> Number:
    """sum_j w_j f(y | mu_j, c, kappa); weights may sum to less than 1."""
    y = np.asarray(y, dtype=float)
    weights = np.asarray(weights, dtype=float)
    mus = np.asarray(mus, dtype=float)
    if weights.shape != mus.shape:
        raise DomainError("weights and mus must have the same length")
    dens = unimodal_pdf(y[..., None], mus, c, kappa)
    return _scalar_or_array(np.sum(weights * dens, axis=-1))
