#!/usr/bin/env python3
"""
Main entry point for the unimodal density toolkit.
"""

import sys
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

# Add the parent directory to the path so src modules can be imported
sys.path.insert(0, str(Path(__file__).parent.parent))

import click
import numpy as np
import pandas as pd
import yaml
from rich.console import Console
from rich.panel import Panel

from src.formatters.csv_formatter import RunArtifactFormatter
from src.formatters.markdown_formatter import MarkdownFormatter
from src.inference.orchestrator import FitOrchestrator
from src.inference.predictive import predict_conditional
from src.inference.summary import RunArtifacts, summarize, write_summary_json
from src.simulate.dependence import DEFAULT_GRID, dependence_study, sign_study
from src.simulate.generators import DEFAULT_PARAMS, SimSpec, generate
from src.utils.config import PRESETS, Config
from src.utils.errors import ConfigError, UnimodalError
from src.utils.logger import set_default_level, setup_logger

console = Console(stderr=True)
logger = setup_logger(__name__)


def _parse_assignments(pairs: Tuple[str, ...]) -> Dict[str, Any]:
    """``key=value`` strings with YAML-typed values."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"expected key=value, got '{pair}'")
        key, value = pair.split("=", 1)
        out[key.strip()] = yaml.safe_load(value)
    return out


def _float_list(text: Optional[str]) -> Optional[list]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"expected comma-separated numbers, got '{text}'") from e


def _run(action, verbose: bool = False):
    """Run a command body, mapping package errors to exit codes."""
    try:
        action()
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        sys.exit(130)
    except UnimodalError as e:
        console.print(f"\n[bold red]Error:[/bold red] {e}")
        sys.exit(e.exit_code)
    except Exception as e:
        logger.exception("Unexpected error occurred")
        console.print(f"\n[bold red]Error:[/bold red] {str(e)}")
        if verbose:
            console.print_exception()
        sys.exit(1)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--quiet", "-q", is_flag=True, help="Only log warnings and errors")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, quiet: bool):
    """
    Bayesian nonparametric unimodal density estimation.

    Examples:

        # Simulate the normal benchmark and fit it
        python src/main.py simulate --kind model_A --n 100 --seed 1 -o data.csv
        python src/main.py fit -i data.csv -o runs/a --preset long_univariate

        # Summarize a run
        python src/main.py summarize --run runs/a
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet
    set_default_level("DEBUG" if verbose else "WARNING" if quiet else "INFO")


@cli.command()
@click.option("--kind", "-k", type=click.Choice(sorted(DEFAULT_PARAMS)), required=True, help="Generator")
@click.option("--n", "n", type=int, default=100, show_default=True, help="Number of observations")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
@click.option("--param", "-p", multiple=True, help="Generator parameter as key=value (repeatable)")
@click.option("--gamma-convention", type=click.Choice(["rate", "scale"]), help="Reading of the model_B gamma")
@click.option("--output", "-o", type=click.Path(), required=True, help="Output CSV path")
@click.pass_context
def simulate(ctx, kind: str, n: int, seed: int, param: Tuple[str, ...], gamma_convention: Optional[str], output: str):
    """Simulate a benchmark dataset as CSV."""

    def action():
        params = _parse_assignments(param)
        if gamma_convention:
            params["gamma_convention"] = gamma_convention
        try:
            spec = SimSpec(kind=kind, n=n, seed=seed, params=params)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        dataset = generate(spec)
        dataset.save(Path(output))
        console.print(f"[green]Wrote {dataset.n} observation(s) to[/green] {output}")

    _run(action, ctx.obj["verbose"])


@cli.command()
@click.option("--config", "-c", "config_path", type=click.Path(exists=True), help="Configuration file (YAML, JSON or key=value)")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), help="Named preset")
@click.option("--model", "-m", type=click.Choice(["uni_marginal", "uni_bridge", "bivariate"]), help="Sampler")
@click.option("--input", "-i", "input_path", type=click.Path(), help="Observation CSV")
@click.option("--columns", help="Comma-separated column names")
@click.option("--output", "-o", type=click.Path(), help="Run directory")
@click.option("--iterations", "-T", type=int, help="Sweeps per chain")
@click.option("--burn-in", type=int, help="Sweeps discarded")
@click.option("--thin", type=int, help="Keep every thin-th sweep")
@click.option("--seed", type=int, help="Root seed")
@click.option("--chains", type=int, help="Number of chains")
@click.option("--workers", type=int, help="Processes for concurrent chains")
@click.option("--n-rows", type=int, help="Random subset of rows")
@click.option("--row-seed", type=int, help="Seed of the row subset")
@click.option("--set", "-s", "assignments", multiple=True, help="Any config field as dotted.key=value (repeatable)")
@click.option("--no-progress", is_flag=True, help="Hide progress bars")
@click.pass_context
def fit(ctx, config_path, preset, model, input_path, columns, output, iterations, burn_in, thin, seed,
        chains, workers, n_rows, row_seed, assignments, no_progress):
    """Fit a model and write draws, predictive draws, diagnostics and a manifest."""

    def action():
        console.print(Panel.fit(
            "[bold blue]Unimodal DP mixture[/bold blue]\nPosterior sampling",
            border_style="blue"
        ))
        if preset:
            config = Config.preset(preset)
        else:
            config = Config.load(Path(config_path)) if config_path else Config.load_default()

        overrides = {
            "model": model,
            "io.input_path": input_path,
            "io.columns": [c.strip() for c in columns.split(",")] if columns else None,
            "io.output_directory": output,
            "io.n_rows": n_rows,
            "io.row_seed": row_seed,
            "chain.iterations": iterations,
            "chain.burn_in": burn_in,
            "chain.thin": thin,
            "chain.seed": seed,
            "chain.n_chains": chains,
            "chain.n_workers": workers,
            "chain.show_progress": False if no_progress or ctx.obj["quiet"] else None,
        }
        overrides.update(_parse_assignments(assignments))
        config = config.with_overrides(overrides)
        if ctx.obj["verbose"]:
            config.set_log_level("DEBUG")
        elif ctx.obj["quiet"]:
            config.set_log_level("WARNING")
        set_default_level(config.log_level)

        console.print(f"\n[cyan]Model:[/cyan] {config.model}")
        console.print(f"[cyan]Input:[/cyan] {config.io.input_path}")
        console.print(f"[cyan]Output:[/cyan] {config.io.output_directory}")

        config.ensure_directories()
        result = FitOrchestrator(config).fit()
        written = RunArtifactFormatter().format(result, config.io.output_directory)
        config.save(config.io.output_directory / "config.yaml")

        console.print("\n[bold green]Fit completed[/bold green]")
        for path in written:
            console.print(f"  {path}")
        if result.warnings:
            console.print("\n[yellow]Warnings:[/yellow]")
            for warning in result.warnings:
                console.print(f"  {warning}")

    _run(action, ctx.obj["verbose"])


@cli.command()
@click.option("--run", "run_dir", type=click.Path(exists=True, file_okay=False), required=True, help="Run directory")
@click.option("--given", help="Comma-separated values of the first variable")
@click.option("--given-file", type=click.Path(exists=True), help="CSV whose first column holds the given values")
@click.option("--n-draws", type=int, default=1000, show_default=True, help="Draws per given value")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
@click.option("--output", "-o", type=click.Path(), help="Output CSV (default: <run>/conditional.csv)")
@click.pass_context
def predict(ctx, run_dir, given, given_file, n_draws, seed, output):
    """Quantiles of the second variable given values of the first (bivariate runs)."""

    def action():
        if given is None and given_file is None:
            raise ConfigError("pass --given or --given-file")
        values = _float_list(given) if given is not None else pd.read_csv(given_file).iloc[:, 0].to_numpy(dtype=float)
        run = RunArtifacts.load(Path(run_dir))
        sigma_mu2 = float(run.manifest.get("config", {}).get("priors", {}).get("sigma_mu2", 10.0))
        table = predict_conditional(run.states(), values, n_draws, sigma_mu2, np.random.default_rng(seed))
        target = Path(output) if output else Path(run_dir) / "conditional.csv"
        target.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(target, index=False, float_format="%.17g", lineterminator="\n")
        console.print(f"[green]Wrote conditional quantiles to[/green] {target}")

    _run(action, ctx.obj["verbose"])


@cli.command("summarize")
@click.option("--run", "run_dir", type=click.Path(exists=True, file_okay=False), required=True, help="Run directory")
@click.option("--output", "-o", type=click.Path(), help="Output directory (default: the run directory)")
@click.option("--bins", type=int, default=50, show_default=True, help="Histogram bins of the plot data")
@click.pass_context
def summarize_run(ctx, run_dir, output, bins):
    """Write summary.json and summary.md for a run."""

    def action():
        report = summarize(Path(run_dir), bins=bins)
        target = Path(output) if output else Path(run_dir)
        paths = [write_summary_json(report, target / "summary.json")]
        paths += MarkdownFormatter().format(report, target)
        for row in report["posterior"]:
            console.print(f"  {row['parameter']}: mean {row['mean']:.4g}, sd {row['sd']:.4g}")
        for path in paths:
            console.print(f"[green]Wrote[/green] {path}")

    _run(action, ctx.obj["verbose"])


@cli.command("study-dependence")
@click.option("--side", type=click.Choice(["Z", "X", "both"]), default="both", show_default=True)
@click.option("--mu", default="10,10", show_default=True, help="Component means mu_1,mu_2")
@click.option("--c", "c_values", default="100,100", show_default=True, help="c_1,c_2")
@click.option("--grid", help="Comma-separated correlations (default -1, -0.9, ..., 1)")
@click.option("--reps", type=int, default=100, show_default=True, help="Datasets per grid value")
@click.option("--n", "n", type=int, default=100, show_default=True, help="Observations per dataset")
@click.option("--method", type=click.Choice(["pearson", "spearman", "kendall"]), default="pearson", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--signs/--no-signs", default=True, help="Also run the sign-pattern study")
@click.option("--output", "-o", type=click.Path(), required=True, help="Output directory")
@click.pass_context
def study_dependence(ctx, side, mu, c_values, grid, reps, n, method, seed, signs, output):
    """Correlation bands of Y when dependence is imposed on Z or on X."""

    def action():
        out_dir = Path(output)
        out_dir.mkdir(parents=True, exist_ok=True)
        mu_pair = tuple(_float_list(mu))
        c_pair = tuple(_float_list(c_values))
        if len(mu_pair) != 2 or len(c_pair) != 2:
            raise ConfigError("--mu and --c take two values each")
        grid_values = _float_list(grid) or list(DEFAULT_GRID)
        root = np.random.default_rng(seed)
        sides = ["Z", "X"] if side == "both" else [side]
        for name, child in zip(sides, root.spawn(len(sides))):
            table = dependence_study(name, mu_pair, grid_values, reps, n, child, c=c_pair, method=method)
            path = out_dir / f"dependence_{name}.csv"
            table.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
            console.print(f"[green]Wrote[/green] {path}")
        if signs:
            table = sign_study(rng=np.random.default_rng(seed + 1), c=c_pair, method=method)
            path = out_dir / "dependence_signs.csv"
            table.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
            console.print(f"[green]Wrote[/green] {path}")

    _run(action, ctx.obj["verbose"])


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
