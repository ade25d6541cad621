"""Configuration layering: defaults, TRANSIT_* variables, config file, overrides."""

import json

import pytest
from pydantic import ValidationError

from Transit.Config import ConfigError, TransitConfig, load_config


@pytest.fixture
def no_env_file(tmp_path, monkeypatch):
    for name in TransitConfig.model_fields:
        monkeypatch.delenv("TRANSIT_" + name.upper(), raising=False)
    return str(tmp_path / "missing.env")


def test_defaults(no_env_file):
    config = load_config(env_file=no_env_file)
    assert config == TransitConfig()
    assert config.pivot_rule == "dantzig"
    assert config.tol_feas == 1e-9 and config.tol_opt == 1e-7
    assert config.enumeration_budget == 10**7


def test_precedence(tmp_path, monkeypatch, no_env_file):
    monkeypatch.setenv("TRANSIT_TOL_OPT", "1e-6")
    monkeypatch.setenv("TRANSIT_SEED", "3")
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 4, "pivot_rule": "bland"}))

    config = load_config(str(path), overrides={"pivot_rule": "dantzig", "tol_feas": None}, env_file=no_env_file)
    assert config.tol_opt == 1e-6         # environment
    assert config.seed == 4               # file beats environment
    assert config.pivot_rule == "dantzig"  # override beats file
    assert config.tol_feas == 1e-9        # None override ignored


def test_dotenv_file_is_read(tmp_path, no_env_file, monkeypatch):
    # registered with monkeypatch so the variable python-dotenv sets is removed afterwards
    monkeypatch.setenv("TRANSIT_REFACTOR_PERIOD", "1")
    monkeypatch.delenv("TRANSIT_REFACTOR_PERIOD")
    env = tmp_path / ".env"
    env.write_text("TRANSIT_REFACTOR_PERIOD=7\n")
    config = load_config(env_file=str(env))
    assert config.refactor_period == 7


@pytest.mark.parametrize("content, match", [
    ('{"pivot_rule": "steepest"}', "pivot_rule"),
    ('{"colour": 1}', "colour"),
    ('{"tol_feas": -1}', "tol_feas"),
    ("[1, 2]", "JSON object"),
    ('{"seed": 1,\n', "line"),
])
def test_bad_files(tmp_path, no_env_file, content, match):
    path = tmp_path / "config.json"
    path.write_text(content)
    with pytest.raises(ConfigError, match=match):
        load_config(str(path), env_file=no_env_file)


def test_missing_file(tmp_path, no_env_file):
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(str(tmp_path / "nope.json"), env_file=no_env_file)


def test_config_is_frozen():
    config = TransitConfig()
    with pytest.raises(ValidationError):
        config.seed = 5
