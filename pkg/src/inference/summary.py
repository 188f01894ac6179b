"""
Reading a run directory back and summarizing it.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from src.formatters.csv_formatter import DRAWS_FILE, MANIFEST_FILE, PREDICTIVE_FILE, STATES_FILE
from src.inference.diagnostics import (
    diagnostics_table,
    histogram_counts,
    parameter_columns,
    posterior_mode,
    posterior_summary,
)
from src.inference.predictive import windowed_correlations
from src.samplers.state import PosteriorDraw
from src.utils.errors import DataError


@dataclass
class RunArtifacts:
    """Files of one fit, as written by RunArtifactFormatter."""

    run_dir: Path
    manifest: Dict[str, Any]
    draws: pd.DataFrame
    predictive: pd.DataFrame

    @classmethod
    def load(cls, run_dir: Path) -> "RunArtifacts":
        run_dir = Path(run_dir)
        draws_path = run_dir / DRAWS_FILE
        if not draws_path.exists():
            raise DataError(f"no draw file in {run_dir}")
        try:
            draws = pd.read_csv(draws_path)
        except pd.errors.EmptyDataError:
            draws = pd.DataFrame()
        if draws.empty:
            raise DataError(f"no samples in {draws_path}")

        manifest_path = run_dir / MANIFEST_FILE
        manifest = json.loads(manifest_path.read_text(encoding="utf-8")) if manifest_path.exists() else {}
        predictive_path = run_dir / PREDICTIVE_FILE
        predictive = pd.read_csv(predictive_path) if predictive_path.exists() else pd.DataFrame()
        return cls(run_dir=run_dir, manifest=manifest, draws=draws, predictive=predictive)

    @property
    def columns(self) -> List[str]:
        return list(self.manifest.get("data", {}).get("columns", []))

    def states(self) -> List[PosteriorDraw]:
        path = self.run_dir / STATES_FILE
        if not path.exists():
            raise DataError(f"no retained states in {self.run_dir}")
        with open(path, encoding="utf-8") as f:
            draws = [PosteriorDraw.from_json(json.loads(line)) for line in f if line.strip()]
        if not draws:
            raise DataError(f"no samples in {path}")
        return draws


def summarize(run_dir: Path, bins: int = 50, window: int = 100) -> Dict[str, Any]:
    """
    Posterior means, SDs and quantiles, KDE modes, ESS, acceptance rates and
    predictive plot data of a run.
    """
    run = RunArtifacts.load(run_dir)
    columns = parameter_columns(run.draws)
    summary = posterior_summary(run.draws, columns)
    summary["mode"] = [posterior_mode(run.draws[col].to_numpy(dtype=float)) for col in columns]

    report: Dict[str, Any] = {
        "run_dir": str(run.run_dir),
        "model": run.manifest.get("model", "unknown"),
        "n_draws": int(len(run.draws)),
        "n_chains": int(run.draws["chain"].nunique()),
        "posterior": summary.to_dict(orient="records"),
        "diagnostics": diagnostics_table(run.draws, columns).to_dict(orient="records"),
        "acceptance_rates": run.manifest.get("acceptance_rates", {}),
        "predictive_histograms": {},
    }

    data_columns = [col for col in run.columns if col in run.predictive.columns]
    for col in data_columns:
        values = run.predictive[col].to_numpy(dtype=float)
        report["predictive_histograms"][col] = histogram_counts(values, bins=bins, trim=0.005).to_dict(orient="records")
    if len(data_columns) == 2:
        corrs = np.concatenate([
            windowed_correlations(group[data_columns].to_numpy(dtype=float), window)
            for _, group in run.predictive.groupby("chain", sort=True)
        ])
        if len(corrs):
            q05, q50, q95 = np.quantile(corrs, [0.05, 0.5, 0.95])
            report["predictive_correlation"] = {
                "windows": int(len(corrs)), "q0.05": float(q05), "median": float(q50), "q0.95": float(q95),
            }
    return report


def write_summary_json(report: Dict[str, Any], output_path: Path) -> Path:
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(json.dumps(report, indent=2, default=float) + "\n", encoding="utf-8")
    return output_path
