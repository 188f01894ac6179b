"""
End-to-end tests of the command-line interface.
"""

import json

import pandas as pd
import pytest
from click.testing import CliRunner

from src.main import cli

FAST = ["--iterations", "50", "--burn-in", "10", "--thin", "2", "--seed", "5", "--no-progress",
        "--set", "priors.alpha_c=2", "--set", "priors.beta_c=2", "--set", "priors.sigma_kappa2=100"]


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, ["--quiet", *args], catch_exceptions=False)


def simulate(runner, tmp_path, kind, n=30, name="data.csv"):
    path = tmp_path / name
    result = invoke(runner, "simulate", "--kind", kind, "--n", str(n), "--seed", "1", "-o", str(path))
    assert result.exit_code == 0, result.output
    return path


def test_simulate_reproducible(runner, tmp_path):
    first = simulate(runner, tmp_path, "model_B", name="a.csv")
    second = simulate(runner, tmp_path, "model_B", name="b.csv")
    assert first.read_bytes() == second.read_bytes()
    assert list(pd.read_csv(first).columns) == ["y"]


def test_simulate_gamma_convention(runner, tmp_path):
    path = tmp_path / "scale.csv"
    result = invoke(runner, "simulate", "--kind", "model_B", "--n", "2000", "--gamma-convention", "scale",
                    "-o", str(path))
    assert result.exit_code == 0
    assert pd.read_csv(path)["y"].mean() > 10.0


def test_simulate_bad_parameter(runner, tmp_path):
    result = invoke(runner, "simulate", "--kind", "model_A", "-p", "mean", "-o", str(tmp_path / "x.csv"))
    assert result.exit_code == 2


def test_fit_and_summarize(runner, tmp_path):
    data = simulate(runner, tmp_path, "model_A")
    run_dir = tmp_path / "run"
    result = invoke(runner, "fit", "-i", str(data), "-o", str(run_dir), *FAST)
    assert result.exit_code == 0, result.output
    for name in ("draws.csv", "predictive.csv", "diagnostics.csv", "manifest.json", "states.jsonl", "config.yaml"):
        assert (run_dir / name).exists()
    assert len(pd.read_csv(run_dir / "draws.csv")) == 20

    result = invoke(runner, "summarize", "--run", str(run_dir))
    assert result.exit_code == 0, result.output
    report = json.loads((run_dir / "summary.json").read_text())
    assert report["n_draws"] == 20
    assert (run_dir / "summary.md").exists()


def test_fit_byte_identical(runner, tmp_path):
    data = simulate(runner, tmp_path, "model_A")
    for name in ("a", "b"):
        result = invoke(runner, "fit", "-i", str(data), "-o", str(tmp_path / name), *FAST)
        assert result.exit_code == 0
    for name in ("draws.csv", "predictive.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_bivariate_fit_and_predict(runner, tmp_path):
    data = simulate(runner, tmp_path, "biv_normal", n=20)
    run_dir = tmp_path / "biv"
    result = invoke(runner, "fit", "-m", "bivariate", "-i", str(data), "-o", str(run_dir), *FAST)
    assert result.exit_code == 0, result.output

    result = invoke(runner, "predict", "--run", str(run_dir), "--given", "28,30,32", "--n-draws", "100")
    assert result.exit_code == 0, result.output
    table = pd.read_csv(run_dir / "conditional.csv")
    assert table["given"].tolist() == [28.0, 30.0, 32.0]
    assert (table["q0.025"] <= table["q0.975"]).all()


def test_fit_with_config_file(runner, tmp_path):
    data = simulate(runner, tmp_path, "model_A")
    config = tmp_path / "run.conf"
    config.write_text(
        "model = uni_bridge\n"
        f"io.input_path = {data}\n"
        f"io.output_directory = {tmp_path / 'bridge'}\n"
        "chain.iterations = 30\nchain.burn_in = 10\nchain.thin = 5\nchain.show_progress = false\n"
    )
    result = invoke(runner, "fit", "--config", str(config))
    assert result.exit_code == 0, result.output
    assert json.loads((tmp_path / "bridge" / "manifest.json").read_text())["model"] == "uni_bridge"


def test_missing_input_file_is_data_error(runner, tmp_path):
    result = invoke(runner, "fit", "-i", str(tmp_path / "absent.csv"), "-o", str(tmp_path / "run"), *FAST)
    assert result.exit_code == 3


def test_bad_cell_is_data_error(runner, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y\n1.0\noops\n")
    result = invoke(runner, "fit", "-i", str(path), "-o", str(tmp_path / "run"), *FAST)
    assert result.exit_code == 3


def test_invalid_config_value(runner, tmp_path):
    data = simulate(runner, tmp_path, "model_A")
    result = invoke(runner, "fit", "-i", str(data), "-o", str(tmp_path / "run"), *FAST, "--set", "chain.thin=0")
    assert result.exit_code == 2


def test_no_input_is_config_error(runner, tmp_path):
    result = invoke(runner, "fit", "-o", str(tmp_path / "run"), *FAST)
    assert result.exit_code == 2


def test_summarize_empty_run(runner, tmp_path):
    (tmp_path / "draws.csv").write_text("chain,iteration,kappa\n")
    result = invoke(runner, "summarize", "--run", str(tmp_path))
    assert result.exit_code == 3


def test_predict_needs_given(runner, tmp_path):
    result = invoke(runner, "predict", "--run", str(tmp_path))
    assert result.exit_code == 2


def test_study_dependence(runner, tmp_path):
    out = tmp_path / "study"
    result = invoke(runner, "study-dependence", "--grid=-0.5,0,0.5", "--reps", "5", "--n", "40",
                    "--no-signs", "-o", str(out))
    assert result.exit_code == 0, result.output
    for side in ("Z", "X"):
        assert len(pd.read_csv(out / f"dependence_{side}.csv")) == 3
    assert not (out / "dependence_signs.csv").exists()
