# src/WMorse/config/run_config.py
"""
Run configuration: CLI flags override the JSON config file, which overrides
the defaults in constants.py.

Config file layout (every key optional):
    {"g": 1.0, "k": 0.0, "n_levels": 8,
     "tolerances": {"root_tol": 1e-10, "ode_tol": 1e-11, "quad_tol": 1e-10},
     "grid": {"x_max": 3.0, "n_samples": 601},
     "output": {"path": "out.json", "format": "json"}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from WMorse.config.constants import (
    DEFAULT_LEVELS,
    DEFAULT_SAMPLES,
    DEFAULT_XMAX,
    FD_MIN_POINTS,
    ODE_TOL,
    QUAD_TOL,
    ROOT_TOL,
)
from WMorse.core.types import PotentialParams
from WMorse.utils.errors import ConfigError, WMorseError

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class Tolerances:
    root_tol: float = ROOT_TOL
    ode_tol: float = ODE_TOL
    quad_tol: float = QUAD_TOL

    def __post_init__(self) -> None:
        for name in ("root_tol", "ode_tol", "quad_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"tolerances.{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class GridSpec:
    x_max: float = DEFAULT_XMAX
    n_samples: int = DEFAULT_SAMPLES

    def __post_init__(self) -> None:
        if not (isinstance(self.x_max, (int, float)) and math.isfinite(self.x_max) and self.x_max > 0):
            raise ConfigError(f"grid.x_max must be > 0, got {self.x_max!r}")
        if not isinstance(self.n_samples, int) or self.n_samples < FD_MIN_POINTS:
            raise ConfigError(f"grid.n_samples must be an integer >= {FD_MIN_POINTS}, got {self.n_samples!r}")


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[Path] = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.format not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}, got {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    g: float = 1.0
    k: float = 0.0
    n_levels: int = DEFAULT_LEVELS
    tolerances: Tolerances = field(default_factory=Tolerances)
    grid: GridSpec = field(default_factory=GridSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self) -> None:
        if not isinstance(self.n_levels, int) or self.n_levels < 1:
            raise ConfigError(f"n_levels must be an integer >= 1, got {self.n_levels!r}")
        _ = self.params  # validates g and k

    @property
    def params(self) -> PotentialParams:
        try:
            return PotentialParams(g=float(self.g), k=float(self.k))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid potential parameters g={self.g!r}, k={self.k!r}") from e

    def as_dict(self) -> Dict[str, Any]:
        return {
            "g": self.g,
            "k": self.k,
            "n_levels": self.n_levels,
            "tolerances": {
                "root_tol": self.tolerances.root_tol,
                "ode_tol": self.tolerances.ode_tol,
                "quad_tol": self.tolerances.quad_tol,
            },
            "grid": {"x_max": self.grid.x_max, "n_samples": self.grid.n_samples},
            "output": {"path": None if self.output.path is None else str(self.output.path), "format": self.output.format},
        }


def _section(raw: Mapping[str, Any], key: str) -> Dict[str, Any]:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be an object")
    return dict(value)


def load_config_file(path: Path) -> Dict[str, Any]:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    known = {"g", "k", "n_levels", "tolerances", "grid", "output"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    return raw


def build_config(file_values: Optional[Mapping[str, Any]] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Merge defaults < file values < overrides. ``overrides`` uses flat keys
    (g, k, n_levels, x_max, n_samples, path, format); None means unset.
    """
    raw = dict(file_values or {})
    flat = {k: v for k, v in (overrides or {}).items() if v is not None}
    tol = _section(raw, "tolerances")
    grid = _section(raw, "grid")
    out = _section(raw, "output")
    for key in ("x_max", "n_samples"):
        if key in flat:
            grid[key] = flat[key]
    for key in ("path", "format"):
        if key in flat:
            out[key] = flat[key]
    try:
        cfg = RunConfig(
            g=flat.get("g", raw.get("g", RunConfig.g)),
            k=flat.get("k", raw.get("k", RunConfig.k)),
            n_levels=flat.get("n_levels", raw.get("n_levels", DEFAULT_LEVELS)),
            tolerances=Tolerances(**tol),
            grid=GridSpec(**grid),
            output=OutputSpec(path=Path(out["path"]) if out.get("path") else None, format=out.get("format", "json")),
        )
    except TypeError as e:
        raise ConfigError(f"invalid config: {e}") from e
    except ConfigError:
        raise
    except WMorseError as e:
        raise ConfigError(str(e)) from e
    return cfg

