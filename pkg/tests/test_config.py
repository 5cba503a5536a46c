# tests/test_config.py
import json

import pytest

from WMorse.config.constants import DEFAULT_LEVELS, DEFAULT_SAMPLES, DEFAULT_XMAX, ODE_TOL
from WMorse.config.run_config import GridSpec, OutputSpec, RunConfig, Tolerances, build_config, load_config_file
from WMorse.utils.errors import ConfigError


def test_defaults():
    cfg = build_config()
    assert cfg.n_levels == DEFAULT_LEVELS
    assert cfg.grid == GridSpec(DEFAULT_XMAX, DEFAULT_SAMPLES)
    assert cfg.tolerances.ode_tol == ODE_TOL
    assert cfg.output.path is None and cfg.output.format == "json"
    assert cfg.params.rho0 == 2.0


def test_cli_beats_file_beats_defaults():
    file_values = {"g": 2.0, "k": 1.0, "grid": {"x_max": 5.0}, "tolerances": {"root_tol": 1e-8}}
    cfg = build_config(file_values, {"k": -0.5, "x_max": None, "n_samples": 201})
    assert cfg.g == 2.0
    assert cfg.k == -0.5
    assert cfg.grid.x_max == 5.0
    assert cfg.grid.n_samples == 201
    assert cfg.tolerances.root_tol == 1e-8
    assert cfg.tolerances.quad_tol == Tolerances().quad_tol


def test_output_override(tmp_path):
    cfg = build_config({"output": {"format": "csv"}}, {"path": tmp_path / "x.csv"})
    assert cfg.output.format == "csv"
    assert cfg.output.path == tmp_path / "x.csv"


@pytest.mark.parametrize(
    "file_values, overrides",
    [
        ({}, {"n_samples": 10}),
        ({}, {"n_levels": 0}),
        ({}, {"g": 0.0}),
        ({"grid": {"x_max": -1.0}}, {}),
        ({"tolerances": {"ode_tol": 0.0}}, {}),
        ({"tolerances": {"abs_tol": 1e-3}}, {}),
        ({"output": {"format": "xml"}}, {}),
        ({"grid": [1, 2]}, {}),
    ],
)
def test_invalid_values(file_values, overrides):
    with pytest.raises(ConfigError):
        build_config(file_values, overrides)


def test_direct_construction_validates():
    with pytest.raises(ConfigError):
        GridSpec(n_samples=100.5)
    with pytest.raises(ConfigError):
        OutputSpec(format="yaml")
    with pytest.raises(ConfigError):
        RunConfig(n_levels=2.0)


def test_load_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"g": 1.5, "grid": {"n_samples": 301}}), encoding="utf-8")
    cfg = build_config(load_config_file(path))
    assert cfg.g == 1.5 and cfg.grid.n_samples == 301

    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config_file(path)
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config_file(path)
    path.write_text('{"levels": 3}', encoding="utf-8")
    with pytest.raises(ConfigError, match="levels"):
        load_config_file(path)
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "absent.json")


def test_as_dict_round_trips():
    cfg = build_config({"k": 0.25, "output": {"format": "csv"}})
    again = build_config(cfg.as_dict())
    assert again == cfg
