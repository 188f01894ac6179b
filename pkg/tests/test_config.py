"""
Tests for configuration loading and overrides.
"""

import json

import pytest

from src.utils.config import Config, parse_key_values
from src.utils.errors import ConfigError


def test_defaults():
    config = Config.load_default()
    assert config.model == "uni_marginal"
    assert config.tuning.m == 3
    assert config.tuning.gamma == pytest.approx(0.01)
    assert config.options.m_update == "literal"
    assert config.dim == 1


def test_yaml_json_and_key_value_agree(tmp_path):
    (tmp_path / "a.yaml").write_text("model: bivariate\nchain:\n  seed: 9\n  thin: 3\n")
    (tmp_path / "a.json").write_text(json.dumps({"model": "bivariate", "chain": {"seed": 9, "thin": 3}}))
    (tmp_path / "a.conf").write_text("# run settings\nmodel = bivariate\nchain.seed = 9\nchain.thin = 3  # every third\n")
    configs = [Config.load(tmp_path / name) for name in ("a.yaml", "a.json", "a.conf")]
    assert all(config == configs[0] for config in configs)
    assert configs[0].dim == 2


@pytest.mark.parametrize("name", ["long_univariate", "long_bivariate"])
def test_presets(name):
    config = Config.preset(name)
    assert config.chain.n_retained > 1000


def test_unknown_preset():
    with pytest.raises(ConfigError):
        Config.preset("nope")


def test_n_retained():
    config = Config.from_dict({"chain": {"iterations": 300_000, "burn_in": 10_000, "thin": 100}})
    assert config.chain.n_retained == 2900


@pytest.mark.parametrize("payload", [
    {"model": "trivariate"},
    {"chain": {"iterations": 10, "burn_in": 10}},
    {"chain": {"thin": 0}},
    {"priors": {"sigma_mu2": -1.0}},
    {"options": {"fixed_rho": 1.0}},
    {"options": {"m_update": "other"}},
])
def test_invalid_values(payload):
    with pytest.raises(ConfigError):
        Config.from_dict(payload)


def test_overrides_skip_none():
    config = Config().with_overrides({"chain.seed": 4, "chain.thin": None, "options.kappa_tails": True})
    assert config.chain.seed == 4
    assert config.chain.thin == Config().chain.thin
    assert config.options.kappa_tails


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        Config.load(tmp_path / "absent.yaml")


def test_unparsable_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("model: [unclosed\n")
    with pytest.raises(ConfigError):
        Config.load(path)


def test_key_value_syntax_error():
    with pytest.raises(ConfigError, match="line 2"):
        parse_key_values(["model = bivariate", "no equals sign"])


def test_save_round_trip(tmp_path):
    config = Config().with_overrides({"model": "uni_bridge", "io.columns": ["y"]})
    config.save(tmp_path / "saved.yaml")
    assert Config.load(tmp_path / "saved.yaml") == config
