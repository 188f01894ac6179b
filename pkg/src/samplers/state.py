"""
Chain state containers and recorded snapshots.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from src.mixture.dpmix import AllocationState, StickState


@dataclass
class ChainState:
    """
    Full MCMC state of one chain.

    Arrays are shaped by the data dimension ``dim``: ``mus`` (L, dim),
    ``c`` and ``kappa`` (dim,), ``x`` (n, dim) when latent uniforms are kept.
    """

    sticks: StickState
    alloc: AllocationState
    mus: np.ndarray
    c: np.ndarray
    kappa: np.ndarray
    x: Optional[np.ndarray] = None
    rho: float = 0.0

    @property
    def dim(self) -> int:
        return self.mus.shape[1]

    @property
    def n_components(self) -> int:
        return len(self.mus)

    @property
    def n_clusters(self) -> int:
        return len(np.unique(self.alloc.d))

    def resize(self, size: int, sigma_mu2: float, rng: np.random.Generator):
        """Truncate or grow to ``size`` components; new means come from the prior."""
        if size > len(self.mus):
            extra = rng.normal(0.0, math.sqrt(sigma_mu2), size=(size - len(self.mus), self.dim))
            self.mus = np.vstack([self.mus, extra])
        else:
            self.mus = self.mus[:size]
        if size > self.sticks.size:
            self.sticks.extend(size, rng)
        else:
            self.sticks.truncate(size)

    def copy(self) -> "ChainState":
        return type(self)(
            sticks=self.sticks.copy(),
            alloc=self.alloc.copy(),
            mus=self.mus.copy(),
            c=self.c.copy(),
            kappa=self.kappa.copy(),
            x=None if self.x is None else self.x.copy(),
            rho=self.rho,
        )


class UniChainState(ChainState):
    """Univariate state (dim = 1); ``x`` is kept only by the latent-x sampler."""


class BivChainState(ChainState):
    """Bivariate state with one shared allocation per observation pair."""


@dataclass(frozen=True)
class PosteriorDraw:
    """One recorded state snapshot, trimmed to the components carrying weight."""

    chain: int
    iteration: int
    kappa: np.ndarray
    c: np.ndarray
    M: float
    rho: float
    n_clusters: int
    v: np.ndarray
    mus: np.ndarray
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_state(cls, state: ChainState, chain: int, iteration: int, mass_tol: float = 1e-12) -> "PosteriorDraw":
        w = state.sticks.w
        cum = np.cumsum(w)
        keep = int(np.searchsorted(cum, 1.0 - mass_tol)) + 1
        keep = max(min(keep, len(w)), state.alloc.D)
        return cls(
            chain=chain,
            iteration=iteration,
            kappa=state.kappa.copy(),
            c=state.c.copy(),
            M=float(state.sticks.M),
            rho=float(state.rho),
            n_clusters=state.n_clusters,
            v=state.sticks.v[:keep].copy(),
            mus=state.mus[:keep].copy(),
        )

    def to_state(self) -> ChainState:
        """Rebuild a state sufficient for predictive simulation."""
        return ChainState(
            sticks=StickState(v=self.v.copy(), M=self.M),
            alloc=AllocationState(d=np.zeros(0, dtype=np.int64), u=np.zeros(0)),
            mus=self.mus.copy(),
            c=self.c.copy(),
            kappa=self.kappa.copy(),
            rho=self.rho,
        )

    def scalar_record(self) -> Dict[str, float]:
        """Flat row for the posterior-draw CSV."""
        record: Dict[str, Any] = {"chain": self.chain, "iteration": self.iteration}
        dim = len(self.kappa)
        for l in range(dim):
            suffix = "" if dim == 1 else f"_{l + 1}"
            record[f"kappa{suffix}"] = float(self.kappa[l])
            record[f"c{suffix}"] = float(self.c[l])
        record["M"] = self.M
        if dim > 1:
            record["rho"] = self.rho
        record["n_clusters"] = self.n_clusters
        record.update(self.extra)
        return record

    def to_json(self) -> Dict[str, Any]:
        return {
            "chain": self.chain,
            "iteration": self.iteration,
            "kappa": self.kappa.tolist(),
            "c": self.c.tolist(),
            "M": self.M,
            "rho": self.rho,
            "n_clusters": self.n_clusters,
            "v": self.v.tolist(),
            "mus": self.mus.tolist(),
            "extra": dict(self.extra),
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> "PosteriorDraw":
        return cls(
            chain=int(payload["chain"]),
            iteration=int(payload["iteration"]),
            kappa=np.asarray(payload["kappa"], dtype=float),
            c=np.asarray(payload["c"], dtype=float),
            M=float(payload["M"]),
            rho=float(payload["rho"]),
            n_clusters=int(payload["n_clusters"]),
            v=np.asarray(payload["v"], dtype=float),
            mus=np.asarray(payload["mus"], dtype=float).reshape(-1, len(payload["kappa"])),
            extra=dict(payload.get("extra", {})),
        )
