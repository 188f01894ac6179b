"""
CSV/JSON writer for the artifacts of a fit.
"""

import json
from pathlib import Path
from typing import List

import numpy as np

from src.formatters.base_formatter import BaseFormatter
from src.inference.diagnostics import histogram_counts

DRAWS_FILE = "draws.csv"
STATES_FILE = "states.jsonl"
PREDICTIVE_FILE = "predictive.csv"
DIAGNOSTICS_FILE = "diagnostics.csv"
MANIFEST_FILE = "manifest.json"
CORRELATIONS_FILE = "predictive_correlations.csv"
HISTOGRAM_PREFIX = "predictive_histogram_"
KAPPA_HISTOGRAM_PREFIX = "posterior_histogram_"


class RunArtifactFormatter(BaseFormatter):
    """
    Writes a fit to a run directory.

    Files:
    - draws.csv: one retained state per row (kappa, c, M, rho, clusters, log-likelihood)
    - states.jsonl: full retained states (sticks and means) for later prediction
    - predictive.csv: one predictive draw per retained state
    - diagnostics.csv: ESS, MCSE and R-hat per parameter
    - predictive_correlations.csv: per-100-draw correlations (bivariate)
    - predictive_histogram_<column>.csv, posterior_histogram_<kappa>.csv: plot data
    - manifest.json: configuration echo, seeds, acceptance rates, timings
    """

    def format(self, result, output_dir: Path) -> List[Path]:
        """
        Write every artifact of a FitResult.

        Args:
            result: FitResult from the orchestrator
            output_dir: Run directory

        Returns:
            Paths of the written files
        """
        self.logger.info(f"Writing run artifacts to: {output_dir}")
        output_dir = Path(output_dir)
        bins = int(self.config.get("histogram_bins", 50))
        trim = float(self.config.get("histogram_trim", 0.005))
        written = []

        draws = result.draws_frame()
        written.append(self._write_frame(draws, output_dir / DRAWS_FILE))
        written.append(self._write_states(result, output_dir / STATES_FILE))

        predictive = result.predictive_frame()
        written.append(self._write_frame(predictive, output_dir / PREDICTIVE_FILE))
        written.append(self._write_frame(result.diagnostics(), output_dir / DIAGNOSTICS_FILE))

        for column in result.dataset.columns:
            counts = histogram_counts(predictive[column].to_numpy(), bins=bins, trim=trim)
            written.append(self._write_frame(counts, output_dir / f"{HISTOGRAM_PREFIX}{column}.csv"))
        for column in [col for col in draws.columns if col.startswith("kappa")]:
            counts = histogram_counts(draws[column].to_numpy(), bins=bins)
            written.append(self._write_frame(counts, output_dir / f"{KAPPA_HISTOGRAM_PREFIX}{column}.csv"))
        if result.dataset.dim == 2:
            window = int(self.config.get("correlation_window", 100))
            written.append(self._write_frame(result.predictive_correlations(window), output_dir / CORRELATIONS_FILE))

        written.append(self._write_json(self._manifest(result), output_dir / MANIFEST_FILE))
        self.logger.info(f"Wrote {len(written)} file(s)")
        return written

    def _write_states(self, result, output_path: Path) -> Path:
        output_path = self._validate_output_path(output_path)
        with open(output_path, "w", encoding="utf-8") as f:
            for draw in result.draws:
                f.write(json.dumps(draw.to_json()) + "\n")
        return output_path

    def _manifest(self, result) -> dict:
        config = result.config
        return {
            "model": config.model,
            "config": config.model_dump(mode="json"),
            "seed": config.chain.seed,
            "chain_seeds": [
                {"chain": chain.chain, "spawn_key": [chain.chain - 1]} for chain in result.chains
            ],
            "data": {
                "source": result.dataset.source,
                "columns": result.dataset.columns,
                "n": result.dataset.n,
                "summary": result.dataset.summary(),
            },
            "retained_states": len(result.draws),
            "acceptance_rates": result.acceptance_rates(),
            "acceptance_by_chain": {str(chain.chain): chain.acceptance.rates() for chain in result.chains},
            "wall_time_seconds": {str(chain.chain): round(chain.wall_time, 3) for chain in result.chains},
            "predictive_mean": np.mean(result.predictive, axis=0).tolist() if len(result.predictive) else [],
            "warnings": result.warnings,
        }
