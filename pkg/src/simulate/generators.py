"""
Synthetic data generators for the benchmark experiments and test fixtures.
"""

from typing import Any, Callable, Dict, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import ndtr

from src.density.copula import sample_copula_pair
from src.density.kernel import sample_unimodal
from src.parsers.csv_parser import Dataset
from src.utils.errors import ConfigError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SimKind = Literal[
    "model_A", "model_B", "biv_normal", "generative_kernel", "z_dependence_study", "x_dependence_study"
]

DEFAULT_PARAMS: Dict[str, Dict[str, Any]] = {
    "model_A": {"mean": 100.0, "sd": 100.0},
    "model_B": {"shape": 3.0, "rate": 10.0, "gamma_convention": "rate"},
    "biv_normal": {"kappa": [30.0, 60.0], "scale": 10.0, "rho_y": 0.5},
    "generative_kernel": {"weights": [1.0], "mus": [[2.0]], "c": [1.0], "kappa": [0.0], "rho": 0.0},
    "z_dependence_study": {"mu": [10.0, 10.0], "c": [100.0, 100.0], "rho": 0.5},
    "x_dependence_study": {"mu": [10.0, 10.0], "c": [100.0, 100.0], "rho": 0.5},
}


class SimSpec(BaseModel):
    """What to simulate: generator kind, size, seed and kind-specific parameters."""

    kind: SimKind
    n: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0)
    params: Dict[str, Any] = Field(default_factory=dict)

    def resolved_params(self) -> Dict[str, Any]:
        merged = dict(DEFAULT_PARAMS[self.kind])
        merged.update(self.params)
        return merged


def correlated_normals(rho: float, rng: np.random.Generator, size: int):
    """Standard normal pairs with correlation rho in [-1, 1]."""
    if not -1.0 <= rho <= 1.0:
        raise ConfigError(f"correlation must lie in [-1, 1], got {rho}")
    e1 = rng.standard_normal(size)
    e2 = rho * e1 + np.sqrt(1.0 - rho * rho) * rng.standard_normal(size)
    return e1, e2


def _model_a(n: int, p: Dict[str, Any], rng: np.random.Generator) -> np.ndarray:
    return rng.normal(p["mean"], p["sd"], size=n)[:, None]


def _model_b(n: int, p: Dict[str, Any], rng: np.random.Generator) -> np.ndarray:
    convention = p["gamma_convention"]
    if convention == "rate":
        scale = 1.0 / p["rate"]
    elif convention == "scale":
        scale = p["rate"]
    else:
        raise ConfigError(f"gamma_convention must be 'rate' or 'scale', got '{convention}'")
    return rng.gamma(p["shape"], scale, size=n)[:, None]


def _biv_normal(n: int, p: Dict[str, Any], rng: np.random.Generator) -> np.ndarray:
    rho = p["rho_y"]
    cov = p["scale"] * np.array([[1.0, rho], [rho, 1.0]])
    return rng.multivariate_normal(np.asarray(p["kappa"], dtype=float), cov, size=n)


def _generative_kernel(n: int, p: Dict[str, Any], rng: np.random.Generator) -> np.ndarray:
    """Finite mixture of unimodal kernels; ``weights`` are renormalized."""
    weights = np.asarray(p["weights"], dtype=float)
    mus = np.asarray(p["mus"], dtype=float).reshape(len(weights), -1)
    dim = mus.shape[1]
    c = np.broadcast_to(np.asarray(p["c"], dtype=float), (dim,))
    kappa = np.broadcast_to(np.asarray(p["kappa"], dtype=float), (dim,))
    if np.any(weights < 0) or weights.sum() <= 0:
        raise ConfigError("mixture weights must be nonnegative with a positive sum")
    if np.any(mus == 0):
        raise ConfigError("component means must be nonzero")

    components = rng.choice(len(weights), size=n, p=weights / weights.sum())
    if dim == 1:
        x = rng.uniform(size=(n, 1))
    else:
        x1, x2 = sample_copula_pair(float(p["rho"]), rng, size=n)
        x = np.column_stack([x1, x2])
    return np.asarray(sample_unimodal(mus[components], c, kappa, rng, x=x)).reshape(n, dim)


def coupled_sample(side: str, mu, c, rho: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Y_l = X_l/Z_l with dependence imposed on Z (correlated normals) or on X
    (Gaussian copula); the other pair is independent.
    """
    mu = np.asarray(mu, dtype=float)
    sd = np.abs(mu) / np.sqrt(np.asarray(c, dtype=float))
    if side == "Z":
        e1, e2 = correlated_normals(rho, rng, n)
        z = mu + sd * np.column_stack([e1, e2])
        x = rng.uniform(size=(n, 2))
    elif side == "X":
        e1, e2 = correlated_normals(rho, rng, n)
        x = np.column_stack([ndtr(e1), ndtr(e2)])
        z = mu + sd * rng.standard_normal((n, 2))
    else:
        raise ConfigError(f"dependence side must be 'Z' or 'X', got '{side}'")
    z = np.where(z == 0.0, np.finfo(float).tiny, z)
    return x / z


def _z_study(n: int, p: Dict[str, Any], rng: np.random.Generator) -> np.ndarray:
    return coupled_sample("Z", p["mu"], p["c"], float(p["rho"]), n, rng)


def _x_study(n: int, p: Dict[str, Any], rng: np.random.Generator) -> np.ndarray:
    return coupled_sample("X", p["mu"], p["c"], float(p["rho"]), n, rng)


GENERATORS: Dict[str, Callable[[int, Dict[str, Any], np.random.Generator], np.ndarray]] = {
    "model_A": _model_a,
    "model_B": _model_b,
    "biv_normal": _biv_normal,
    "generative_kernel": _generative_kernel,
    "z_dependence_study": _z_study,
    "x_dependence_study": _x_study,
}


def generate(spec: SimSpec, rng: Optional[np.random.Generator] = None) -> Dataset:
    """
    Simulate a dataset.

    Args:
        spec: Generator kind, size, seed and parameters
        rng: Generator to draw from (default: seeded from ``spec.seed``)

    Returns:
        Dataset with columns ``y`` or ``y1``, ``y2``
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    params = spec.resolved_params()
    try:
        values = GENERATORS[spec.kind](spec.n, params, rng)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad parameters for {spec.kind}: {e}") from e
    columns = ["y"] if values.shape[1] == 1 else [f"y{l + 1}" for l in range(values.shape[1])]
    logger.debug(f"Generated {spec.n} draw(s) of {spec.kind}")
    return Dataset(
        values=values,
        columns=columns,
        source=f"simulate:{spec.kind}",
        metadata={"kind": spec.kind, "seed": spec.seed, "params": params},
    )

