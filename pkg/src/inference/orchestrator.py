"""
Fit orchestrator: runs the chains of one configuration and collects the results.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Type

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.inference.diagnostics import diagnostics_table
from src.inference.predictive import windowed_correlations
from src.mixture.dpmix import predictive_draw
from src.parsers.csv_parser import CSVParser, Dataset
from src.samplers.base_sampler import AcceptanceTracker, BaseSampler
from src.samplers.bivariate_sampler import BivariateSampler
from src.samplers.bridge_sampler import BridgeSampler
from src.samplers.marginal_sampler import MarginalSampler
from src.samplers.state import PosteriorDraw
from src.utils.config import Config
from src.utils.errors import ConfigError, DataError
from src.utils.logger import RUN_LOG_FILE, ChainLogger, ProgressLogger, set_default_level, setup_logger

SAMPLERS: Dict[str, Type[BaseSampler]] = {
    "uni_marginal": MarginalSampler,
    "uni_bridge": BridgeSampler,
    "bivariate": BivariateSampler,
}


def build_sampler(config: Config) -> BaseSampler:
    return SAMPLERS[config.model].from_config(config)


@dataclass
class ChainResult:
    """Everything one chain produces."""

    chain: int
    draws: List[PosteriorDraw]
    predictive: np.ndarray
    components: np.ndarray
    acceptance: AcceptanceTracker
    wall_time: float


@dataclass
class FitResult:
    """Merged output of all chains."""

    config: Config
    dataset: Dataset
    chains: List[ChainResult]
    warnings: List[str] = field(default_factory=list)

    @property
    def draws(self) -> List[PosteriorDraw]:
        return [draw for chain in self.chains for draw in chain.draws]

    @property
    def predictive(self) -> np.ndarray:
        return np.vstack([chain.predictive for chain in self.chains])

    def draws_frame(self) -> pd.DataFrame:
        return pd.DataFrame([draw.scalar_record() for draw in self.draws])

    def predictive_frame(self) -> pd.DataFrame:
        rows = []
        for chain in self.chains:
            for k, draw in enumerate(chain.draws):
                row = {"chain": chain.chain, "iteration": draw.iteration}
                for name, value in zip(self.dataset.columns, chain.predictive[k]):
                    row[name] = float(value)
                row["component"] = int(chain.components[k]) + 1
                rows.append(row)
        return pd.DataFrame(rows)

    def acceptance_rates(self) -> Dict[str, float]:
        merged = AcceptanceTracker()
        for chain in self.chains:
            merged.merge(chain.acceptance)
        return merged.rates()

    def diagnostics(self) -> pd.DataFrame:
        frame = self.draws_frame()
        columns = [col for col in frame.columns if col not in ("chain", "iteration")]
        return diagnostics_table(frame, columns)

    def predictive_correlations(self, window: int = 100) -> pd.DataFrame:
        """Per-window correlations of the bivariate predictive draws, chain by chain."""
        rows = []
        for chain in self.chains:
            for k, corr in enumerate(windowed_correlations(chain.predictive, window)):
                rows.append({"chain": chain.chain, "window": k + 1, "correlation": float(corr)})
        return pd.DataFrame(rows, columns=["chain", "window", "correlation"])


def run_chain(config: Config, data: np.ndarray, chain: int, seed: np.random.SeedSequence) -> ChainResult:
    """
    Run one chain: sweeps 1..T, keeping states burn_in+1, burn_in+1+thin, ...
    and one predictive draw per kept state from a separate substream.
    """
    set_default_level(config.log_level)
    sampler = build_sampler(config)
    mcmc_seed, predictive_seed = seed.spawn(2)
    rng = np.random.default_rng(mcmc_seed)
    predictive_rng = np.random.default_rng(predictive_seed)
    settings = config.chain

    start = time.perf_counter()
    state = sampler.initial_state(data, rng)
    draws: List[PosteriorDraw] = []
    predictive: List[np.ndarray] = []
    components: List[int] = []
    for iteration in tqdm(
        range(1, settings.iterations + 1),
        desc=f"chain {chain}",
        disable=not settings.show_progress,
        leave=False,
    ):
        state = sampler.sweep(state, data, rng)
        if iteration > settings.burn_in and (iteration - settings.burn_in - 1) % settings.thin == 0:
            draw = PosteriorDraw.from_state(state, chain=chain, iteration=iteration)
            draw.extra["log_lik"] = sampler.log_likelihood(state, data)
            draws.append(draw)
            future = predictive_draw(state, config.priors.sigma_mu2, predictive_rng)
            predictive.append(future.y)
            components.append(future.component)

    ChainLogger(sampler.logger, chain).info(
        f"kept {len(draws)} state(s); acceptance "
        + ", ".join(f"{k}={v:.3f}" for k, v in sampler.acceptance.rates().items())
    )
    return ChainResult(
        chain=chain,
        draws=draws,
        predictive=np.vstack(predictive) if predictive else np.zeros((0, data.shape[1])),
        components=np.asarray(components, dtype=np.int64),
        acceptance=sampler.acceptance,
        wall_time=time.perf_counter() - start,
    )


class FitOrchestrator:
    """
    Orchestrates a posterior fit.

    Workflow:
    1. Load the observations (CSV or a supplied dataset)
    2. Run the configured number of chains, concurrently if requested
    3. Merge draws, predictive draws and acceptance statistics
    """

    def __init__(self, config: Config):
        """
        Initialize the orchestrator.

        Args:
            config: Run configuration
        """
        self.config = config
        self.logger = setup_logger(self.__class__.__name__)
        self.parser = CSVParser()

    def load_data(self) -> Dataset:
        io = self.config.io
        if io.input_path is None:
            raise ConfigError("no input file given (io.input_path)")
        dataset = self.parser.parse(io.input_path, io.columns or None, io.n_rows, io.row_seed)
        if dataset.dim != self.config.dim:
            raise DataError(f"model {self.config.model} needs {self.config.dim} column(s), got {dataset.dim}")
        return dataset

    def fit(self, dataset: Optional[Dataset] = None) -> FitResult:
        """
        Run all chains.

        Args:
            dataset: Observations; read from ``io.input_path`` when omitted

        Returns:
            FitResult with every chain's output
        """
        self.logger = setup_logger(
            self.__class__.__name__, log_file=Path(self.config.io.output_directory) / RUN_LOG_FILE
        )
        progress = ProgressLogger(self.logger, total_steps=3)
        progress.step("Loading observations")
        dataset = dataset if dataset is not None else self.load_data()
        if dataset.dim != self.config.dim:
            raise DataError(f"model {self.config.model} needs {self.config.dim} column(s), got {dataset.dim}")

        settings = self.config.chain
        progress.step(
            f"Running {settings.n_chains} chain(s) of {self.config.model}: "
            f"T={settings.iterations}, burn-in {settings.burn_in}, thin {settings.thin}"
        )
        seeds = np.random.SeedSequence(settings.seed).spawn(settings.n_chains)
        data = dataset.values
        if settings.n_workers > 1 and settings.n_chains > 1:
            with ProcessPoolExecutor(max_workers=min(settings.n_workers, settings.n_chains)) as pool:
                futures = [pool.submit(run_chain, self.config, data, k + 1, seed) for k, seed in enumerate(seeds)]
                chains = [future.result() for future in futures]
        else:
            chains = [run_chain(self.config, data, k + 1, seed) for k, seed in enumerate(seeds)]

        result = FitResult(config=self.config, dataset=dataset, chains=chains)
        for move, rate in result.acceptance_rates().items():
            if rate < 0.01:
                result.warnings.append(f"acceptance rate of {move} moves is {rate:.4f}")
        for warning in result.warnings:
            self.logger.warning(warning)
        progress.complete(f"Kept {len(result.draws)} posterior state(s)")
        return result
