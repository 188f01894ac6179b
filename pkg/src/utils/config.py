"""
Configuration management for the unimodal mixture toolkit.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator

from src.utils.errors import ConfigError

CONFIG_DIR = Path(__file__).parent.parent.parent / "config"

PRESETS = {
    "long_univariate": "long_univariate.yaml",
    "long_bivariate": "long_bivariate.yaml",
}


class PriorConfig(BaseModel):
    """Prior hyperparameters."""

    sigma_mu2: float = Field(default=10.0, gt=0, description="Variance of the N(0, sigma_mu2) prior on mu_j")
    sigma_kappa2: float = Field(default=10000.0, gt=0, description="Variance of the N(0, sigma_kappa2) prior on kappa")
    alpha_c: float = Field(default=0.1, gt=0, description="Shape of the gamma prior on c")
    beta_c: float = Field(default=0.1, gt=0, description="Rate of the gamma prior on c")
    alpha_M: float = Field(default=0.01, gt=0, description="Shape of the gamma prior on M")
    beta_M: float = Field(default=0.01, gt=0, description="Rate of the gamma prior on M")


class TuningConfig(BaseModel):
    """Proposal scales and algorithm constants."""

    h_mu: float = Field(default=0.25, gt=0, description="SD of the mu random walk")
    h_c: float = Field(default=0.25, gt=0, description="SD of the log-c random walk")
    h_rho: float = Field(default=0.5, gt=0, description="SD of the logit-rho random walk")
    m: int = Field(default=3, ge=1, description="Half-width of the kappa offset window")
    trial_cap: int = Field(default=100, ge=0, description="Copula-proposal trials before falling back to ARS")
    gamma: float = Field(default=0.01, gt=0, description="Rate of the slice sequence xi_j = exp(-gamma j)")
    x_trial_cap: int = Field(default=10_000, ge=1, description="Trial cap of the latent-x rejection sampler")
    ars_max_iter: int = Field(default=1_000, ge=1, description="Iteration cap of adaptive rejection sampling")


class SamplerOptions(BaseModel):
    """Algorithm variants."""

    m_update: Literal["literal", "escobar_west", "sticks"] = "literal"
    kappa_tails: bool = Field(default=False, description="Allow kappa moves into the unbounded end intervals")
    biv_d_pmf: Literal["marginal", "latent"] = "marginal"
    biv_kappa_kernel: Literal["marginal", "latent"] = "marginal"
    fixed_rho: Optional[float] = Field(default=None, ge=0, lt=1, description="Hold rho fixed (bivariate only)")


class ChainConfig(BaseModel):
    """Chain length, thinning and seeding."""

    iterations: int = Field(default=30_000, ge=1)
    burn_in: int = Field(default=2_000, ge=0)
    thin: int = Field(default=10, ge=1)
    seed: int = Field(default=20240101, ge=0)
    n_chains: int = Field(default=1, ge=1)
    n_workers: int = Field(default=1, ge=1, description="Processes used to run chains concurrently")
    show_progress: bool = True

    @model_validator(mode="after")
    def _check_lengths(self) -> "ChainConfig":
        if self.iterations <= self.burn_in:
            raise ValueError(f"iterations ({self.iterations}) must exceed burn_in ({self.burn_in})")
        return self

    @property
    def n_retained(self) -> int:
        """Number of states kept per chain."""
        return len(range(self.burn_in + 1, self.iterations + 1, self.thin))


class IOConfig(BaseModel):
    """Input and output locations."""

    input_path: Optional[Path] = None
    columns: List[str] = Field(default_factory=list)
    output_directory: Path = Field(default=Path("./output"))
    n_rows: Optional[int] = Field(default=None, ge=1, description="Random subset size (None = all rows)")
    row_seed: int = Field(default=0, ge=0, description="Seed of the row subset selection")


class Config(BaseModel):
    """Main run configuration."""

    model: Literal["uni_marginal", "uni_bridge", "bivariate"] = "uni_marginal"
    priors: PriorConfig = Field(default_factory=PriorConfig)
    tuning: TuningConfig = Field(default_factory=TuningConfig)
    options: SamplerOptions = Field(default_factory=SamplerOptions)
    chain: ChainConfig = Field(default_factory=ChainConfig)
    io: IOConfig = Field(default_factory=IOConfig)

    log_level: str = Field(default="INFO")

    @property
    def dim(self) -> int:
        return 2 if self.model == "bivariate" else 1

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "Config":
        try:
            return cls(**(config_dict or {}))
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

    @classmethod
    def load(cls, config_path: Optional[Path] = None) -> "Config":
        """Load configuration from a YAML, JSON or key=value file."""
        if config_path is None:
            return cls()
        config_path = Path(config_path)
        if not config_path.exists():
            raise ConfigError(f"Configuration file not found: {config_path}")

        text = config_path.read_text(encoding="utf-8")
        suffix = config_path.suffix.lower()
        try:
            if suffix == ".json":
                config_dict = json.loads(text)
            elif suffix in (".yaml", ".yml"):
                config_dict = yaml.safe_load(text)
            else:
                config_dict = parse_key_values(text.splitlines())
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigError(f"Could not parse {config_path}: {e}") from e
        return cls.from_dict(config_dict)

    @classmethod
    def load_default(cls) -> "Config":
        """Load default configuration."""
        default_config_path = CONFIG_DIR / "default_config.yaml"
        if default_config_path.exists():
            return cls.load(default_config_path)
        return cls()

    @classmethod
    def preset(cls, name: str) -> "Config":
        """Named experiment preset shipped in ``config/``."""
        if name not in PRESETS:
            raise ConfigError(f"Unknown preset '{name}'; available: {sorted(PRESETS)}")
        return cls.load(CONFIG_DIR / PRESETS[name])

    def with_overrides(self, overrides: Dict[str, Any]) -> "Config":
        """Return a copy with dotted-key overrides applied (``chain.seed=3``)."""
        merged = self.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            _set_dotted(merged, key, value)
        return Config.from_dict(merged)

    def save(self, config_path: Path):
        """Save configuration to file."""
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w") as f:
            yaml.dump(self.model_dump(mode="json"), f, default_flow_style=False)

    def set_log_level(self, level: str):
        """Set logging level."""
        self.log_level = level.upper()

    def ensure_directories(self):
        """Ensure the output directory exists."""
        self.io.output_directory.mkdir(parents=True, exist_ok=True)


RunConfig = Config


def parse_key_values(lines: List[str]) -> Dict[str, Any]:
    """Parse ``a.b=value`` lines into a nested dict; values are YAML scalars."""
    result: Dict[str, Any] = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected key=value, got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        _set_dotted(result, key, yaml.safe_load(value) if value else None)
    return result


def _set_dotted(target: Dict[str, Any], key: str, value: Any):
    parts = key.split(".")
    node = target
    for part in parts[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[parts[-1]] = value
