"""
Posterior summaries and MCMC diagnostics.
"""

from typing import Dict, Iterable, List, Optional, Sequence

import arviz as az
import numpy as np
import pandas as pd
from scipy.stats import gaussian_kde

from src.utils.errors import DataError

DEFAULT_QUANTILES = (0.025, 0.25, 0.5, 0.75, 0.975)

# Columns of the draw table that are bookkeeping rather than parameters
INDEX_COLUMNS = ("chain", "iteration")


def parameter_columns(frame: pd.DataFrame) -> List[str]:
    return [col for col in frame.columns if col not in INDEX_COLUMNS]


def chain_matrix(frame: pd.DataFrame, column: str) -> np.ndarray:
    """(chain, draw) array of one column, chains truncated to the shortest."""
    groups = [group[column].to_numpy(dtype=float) for _, group in frame.groupby("chain", sort=True)]
    length = min(len(g) for g in groups)
    return np.vstack([g[:length] for g in groups])


def effective_sample_size(values: np.ndarray, method: str = "mean") -> float:
    """
    Effective sample size with Geyer's initial monotone sequence estimator.

    Args:
        values: 1-D trace or (chain, draw) array
        method: arviz ESS method ("mean" is the plain autocorrelation estimator)

    Returns:
        ESS; the number of draws for a constant trace
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] < 4:
        return float(values.size)
    if np.all(values == values.flat[0]):
        return float(values.size)
    return float(az.ess(values, method=method))


def diagnostics_table(frame: pd.DataFrame, columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """
    Per-parameter ESS (mean and bulk), Monte Carlo standard error and, with
    two or more chains, rank-normalized R-hat.
    """
    if frame.empty:
        raise DataError("no samples")
    columns = list(columns) if columns is not None else parameter_columns(frame)
    n_chains = frame["chain"].nunique()
    rows = []
    for col in columns:
        matrix = chain_matrix(frame, col)
        ess = effective_sample_size(matrix)
        rows.append({
            "parameter": col,
            "n_draws": int(matrix.size),
            "ess": ess,
            "ess_bulk": effective_sample_size(matrix, method="bulk"),
            "mcse_mean": float(np.std(matrix, ddof=1) / np.sqrt(ess)) if matrix.size > 1 else float("nan"),
            "rhat": float(az.rhat(matrix)) if n_chains > 1 and matrix.shape[1] >= 4 else float("nan"),
        })
    return pd.DataFrame(rows)


def posterior_summary(
    frame: pd.DataFrame,
    columns: Optional[Sequence[str]] = None,
    quantiles: Iterable[float] = DEFAULT_QUANTILES
) -> pd.DataFrame:
    """Mean, SD and quantiles per parameter."""
    if frame.empty:
        raise DataError("no samples")
    columns = list(columns) if columns is not None else parameter_columns(frame)
    quantiles = list(quantiles)
    rows = []
    for col in columns:
        values = frame[col].to_numpy(dtype=float)
        row = {"parameter": col, "mean": float(np.mean(values)), "sd": float(np.std(values, ddof=1)) if len(values) > 1 else 0.0}
        for q, value in zip(quantiles, np.quantile(values, quantiles)):
            row[f"q{q:g}"] = float(value)
        rows.append(row)
    return pd.DataFrame(rows)


def posterior_mode(values: np.ndarray, grid_size: int = 512) -> float:
    """Mode of a Gaussian kernel density estimate of the draws."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2 or np.all(values == values[0]):
        return float(values[0])
    kde = gaussian_kde(values)
    grid = np.linspace(values.min(), values.max(), grid_size)
    return float(grid[np.argmax(kde(grid))])


def histogram_counts(values: np.ndarray, bins: int = 50, trim: float = 0.0) -> pd.DataFrame:
    """
    Histogram as plot data (left edge, right edge, count).

    Args:
        trim: Quantile trimmed from each tail before binning (heavy-tailed predictive draws)
    """
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if len(values) == 0:
        return pd.DataFrame(columns=["left", "right", "count"])
    if trim > 0:
        lo, hi = np.quantile(values, [trim, 1.0 - trim])
        values = values[(values >= lo) & (values <= hi)]
    counts, edges = np.histogram(values, bins=bins)
    return pd.DataFrame({"left": edges[:-1], "right": edges[1:], "count": counts})


def acceptance_summary(rates: Dict[str, float]) -> pd.DataFrame:
    return pd.DataFrame([{"move": move, "rate": rate} for move, rate in sorted(rates.items())])
