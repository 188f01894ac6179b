"""
Joint-distribution ("getting it right") checks for the samplers.

Marginal-conditional draws sample parameters from the prior and data given
parameters. Successive-conditional draws alternate a sampler sweep with a
fresh data draw. A correct sampler makes both sequences share the same
parameter marginals.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd
from scipy.stats import chi2, norm
from tqdm import tqdm

from src.inference.diagnostics import effective_sample_size
from src.samplers.base_sampler import BaseSampler
from src.samplers.state import ChainState
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def state_statistics(state: ChainState) -> Dict[str, float]:
    """Scalar summaries compared between the two sequences."""
    stats = {}
    for l in range(state.dim):
        suffix = "" if state.dim == 1 else f"_{l + 1}"
        stats[f"kappa{suffix}"] = float(state.kappa[l])
        stats[f"log_c{suffix}"] = math.log(state.c[l])
    stats["log_M"] = math.log(state.sticks.M)
    if state.dim > 1:
        stats["rho"] = float(state.rho)
    return stats


def marginal_conditional(sampler: BaseSampler, n: int, n_draws: int, rng: np.random.Generator) -> pd.DataFrame:
    """Independent prior draws of the state."""
    return pd.DataFrame([state_statistics(sampler.draw_prior_state(n, rng)) for _ in range(n_draws)])


def successive_conditional(
    sampler: BaseSampler,
    n: int,
    n_draws: int,
    rng: np.random.Generator,
    sweeps_per_draw: int = 1,
    show_progress: bool = False
) -> pd.DataFrame:
    """Alternate sweeps with data regeneration, starting from a prior draw."""
    state = sampler.draw_prior_state(n, rng)
    data = sampler.regenerate_data(state, rng)
    rows = []
    for _ in tqdm(range(n_draws), disable=not show_progress, desc=sampler.model_name):
        for _ in range(sweeps_per_draw):
            state = sampler.sweep(state, data, rng)
        data = sampler.regenerate_data(state, rng)
        rows.append(state_statistics(state))
    return pd.DataFrame(rows)


@dataclass
class GewekeComparison:
    """Per-statistic comparison of the two sequences."""

    table: pd.DataFrame

    def passed(self, level: float = 0.01) -> bool:
        return bool((self.table["z_pvalue"] > level).all() and (self.table["chi2_pvalue"] > level).all())


def compare(
    marginal: pd.DataFrame,
    successive: pd.DataFrame,
    bins: int = 20,
    transforms: Optional[Dict[str, Callable[[np.ndarray], np.ndarray]]] = None
) -> GewekeComparison:
    """
    Mean z-test and binned chi-square per statistic, both scaled by the
    effective sample size of the autocorrelated successive sequence.

    Bins are the ``bins`` equal-probability intervals of the marginal sample.
    """
    transforms = transforms or {}
    rows = []
    for col in marginal.columns:
        f = transforms.get(col, lambda v: v)
        a = f(marginal[col].to_numpy(dtype=float))
        b = f(successive[col].to_numpy(dtype=float))
        ess = min(effective_sample_size(b), float(len(b)))

        se = math.sqrt(np.var(a, ddof=1) / len(a) + np.var(b, ddof=1) / ess)
        z = (np.mean(b) - np.mean(a)) / se if se > 0 else 0.0

        edges = np.unique(np.quantile(a, np.linspace(0.0, 1.0, bins + 1)[1:-1]))
        expected = np.bincount(np.searchsorted(edges, a, side="right"), minlength=len(edges) + 1) / len(a)
        observed = np.bincount(np.searchsorted(edges, b, side="right"), minlength=len(edges) + 1)
        stat = float(np.sum((observed - len(b) * expected) ** 2 / (len(b) * expected)))
        # Pearson statistic scaled to the effective sample size; the marginal sample's own noise enters the denominator
        stat *= (ess / len(b)) / (1.0 + ess / len(a))
        dof = len(edges)
        rows.append({
            "statistic": col,
            "marginal_mean": float(np.mean(a)),
            "successive_mean": float(np.mean(b)),
            "ess": ess,
            "z": float(z),
            "z_pvalue": float(2.0 * norm.sf(abs(z))),
            "chi2": stat,
            "chi2_pvalue": float(chi2.sf(stat, dof)) if dof > 0 else 1.0,
        })
    table = pd.DataFrame(rows)
    logger.debug(f"Joint-distribution comparison:\n{table.to_string(index=False)}")
    return GewekeComparison(table=table)


def geweke_test(
    sampler: BaseSampler,
    n: int,
    n_draws: int,
    rng: np.random.Generator,
    sweeps_per_draw: int = 1,
    bins: int = 20
) -> GewekeComparison:
    """Run both sequences and compare them."""
    marginal = marginal_conditional(sampler, n, n_draws, rng)
    successive = successive_conditional(sampler, n, n_draws, rng, sweeps_per_draw=sweeps_per_draw)
    return compare(marginal, successive, bins=bins)
