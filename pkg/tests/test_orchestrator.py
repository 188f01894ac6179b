"""
Tests for the fit orchestrator, the run-artifact writers and run summaries.
"""

import json

import numpy as np
import pytest

from src.formatters.csv_formatter import (
    CORRELATIONS_FILE,
    DIAGNOSTICS_FILE,
    DRAWS_FILE,
    MANIFEST_FILE,
    PREDICTIVE_FILE,
    STATES_FILE,
    RunArtifactFormatter,
)
from src.formatters.markdown_formatter import MarkdownFormatter
from src.inference.orchestrator import FitOrchestrator, build_sampler
from src.inference.summary import RunArtifacts, summarize, write_summary_json
from src.parsers.csv_parser import Dataset
from src.samplers.bivariate_sampler import BivariateSampler
from src.utils.errors import ConfigError, DataError
from src.utils.logger import RUN_LOG_FILE


@pytest.fixture
def uni_dataset(uni_data):
    return Dataset(values=uni_data, columns=["y"], source="fixture")


@pytest.fixture
def biv_dataset(biv_data):
    return Dataset(values=biv_data, columns=["y1", "y2"], source="fixture")


class TestFit:
    def test_retained_states(self, short_config, uni_dataset):
        config = short_config(n_chains=2)
        result = FitOrchestrator(config).fit(uni_dataset)
        assert len(result.chains) == 2
        assert len(result.draws) == 2 * config.chain.n_retained
        iterations = [draw.iteration for draw in result.chains[0].draws]
        assert iterations == list(range(11, 61, 5))
        assert result.predictive.shape == (len(result.draws), 1)

    def test_run_log(self, short_config, uni_dataset):
        config = short_config()
        FitOrchestrator(config).fit(uni_dataset)
        text = (config.io.output_directory / RUN_LOG_FILE).read_text()
        assert "[1/3] Loading observations" in text
        assert "Kept" in text

    def test_frames(self, short_config, uni_dataset):
        result = FitOrchestrator(short_config()).fit(uni_dataset)
        draws = result.draws_frame()
        assert {"chain", "iteration", "kappa", "c", "M", "n_clusters", "log_lik"} <= set(draws.columns)
        predictive = result.predictive_frame()
        assert list(predictive.columns) == ["chain", "iteration", "y", "component"]
        assert (predictive["component"] >= 1).all()
        assert "kappa" in result.acceptance_rates()
        assert set(result.diagnostics()["parameter"]) >= {"kappa", "c", "M"}

    def test_reproducible(self, short_config, uni_dataset):
        first = FitOrchestrator(short_config()).fit(uni_dataset).draws_frame()
        second = FitOrchestrator(short_config()).fit(uni_dataset).draws_frame()
        assert first.equals(second)

    def test_chains_differ(self, short_config, uni_dataset):
        result = FitOrchestrator(short_config(n_chains=2)).fit(uni_dataset)
        frame = result.draws_frame()
        assert not np.array_equal(frame[frame.chain == 1]["kappa"], frame[frame.chain == 2]["kappa"])

    def test_dimension_mismatch(self, short_config, uni_dataset):
        with pytest.raises(DataError):
            FitOrchestrator(short_config("bivariate")).fit(uni_dataset)

    def test_missing_input(self, short_config):
        with pytest.raises(ConfigError):
            FitOrchestrator(short_config()).fit()

    def test_loads_csv(self, short_config, uni_dataset, tmp_path):
        path = tmp_path / "obs.csv"
        uni_dataset.save(path)
        config = short_config().with_overrides({"io.input_path": str(path)})
        result = FitOrchestrator(config).fit()
        assert result.dataset.n == uni_dataset.n

    def test_build_sampler(self, short_config):
        assert isinstance(build_sampler(short_config("bivariate")), BivariateSampler)


class TestArtifacts:
    def test_univariate_run_directory(self, short_config, uni_dataset, tmp_path):
        result = FitOrchestrator(short_config()).fit(uni_dataset)
        run_dir = tmp_path / "run"
        written = RunArtifactFormatter().format(result, run_dir)
        names = {path.name for path in written}
        assert {DRAWS_FILE, STATES_FILE, PREDICTIVE_FILE, DIAGNOSTICS_FILE, MANIFEST_FILE} <= names
        assert "predictive_histogram_y.csv" in names
        assert "posterior_histogram_kappa.csv" in names
        assert CORRELATIONS_FILE not in names

        manifest = json.loads((run_dir / MANIFEST_FILE).read_text())
        assert manifest["model"] == "uni_marginal"
        assert manifest["seed"] == 7
        assert manifest["data"]["n"] == uni_dataset.n
        assert manifest["retained_states"] == len(result.draws)

    def test_byte_identical_reruns(self, short_config, uni_dataset, tmp_path):
        for name in ("a", "b"):
            result = FitOrchestrator(short_config()).fit(uni_dataset)
            RunArtifactFormatter().format(result, tmp_path / name)
        for name in (DRAWS_FILE, PREDICTIVE_FILE, STATES_FILE):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_bivariate_summary(self, short_config, biv_dataset, tmp_path):
        config = short_config("bivariate", iterations=230, burn_in=10, thin=1)
        result = FitOrchestrator(config).fit(biv_dataset)
        run_dir = tmp_path / "biv"
        RunArtifactFormatter().format(result, run_dir)
        assert (run_dir / CORRELATIONS_FILE).exists()

        run = RunArtifacts.load(run_dir)
        assert run.columns == ["y1", "y2"]
        assert len(run.states()) == len(result.draws)

        report = summarize(run_dir)
        assert report["model"] == "bivariate"
        assert report["n_draws"] == 220
        assert {row["parameter"] for row in report["posterior"]} >= {"kappa_1", "kappa_2", "rho"}
        assert report["predictive_correlation"]["windows"] == 2
        assert set(report["predictive_histograms"]) == {"y1", "y2"}

        summary_path = write_summary_json(report, run_dir / "summary.json")
        assert json.loads(summary_path.read_text())["model"] == "bivariate"
        markdown = MarkdownFormatter().format(report, run_dir)[0].read_text()
        assert "## Posterior" in markdown
        assert "## Predictive Correlation" in markdown


class TestRunArtifacts:
    def test_missing_draws(self, tmp_path):
        with pytest.raises(DataError, match="no draw file"):
            RunArtifacts.load(tmp_path)

    def test_empty_draws(self, tmp_path):
        (tmp_path / DRAWS_FILE).write_text("chain,iteration,kappa\n")
        with pytest.raises(DataError, match="no samples"):
            RunArtifacts.load(tmp_path)

    def test_missing_states(self, tmp_path):
        (tmp_path / DRAWS_FILE).write_text("chain,iteration,kappa\n1,1,0.5\n")
        with pytest.raises(DataError, match="no retained states"):
            RunArtifacts.load(tmp_path).states()
