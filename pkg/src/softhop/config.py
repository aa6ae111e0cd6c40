"""Run configuration: a sectioned key-value file plus command-line overrides.

Example::

    [model]
    eps_inj = 10
    phi = 1.25
    kappa_c = 0.1
    mu = 0.1

    [sim]
    rel_tol = 1e-9

    [simulate]
    n_hops = 12

Sections ``model`` and ``sim`` are shared; every subcommand has its own
section for grids and targets.  ``--set section.key=value`` overrides a file
value.  Unknown sections or keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field

from .model import DimensionalSpec, ModelParams
from .sim import SimConfig


class ConfigError(ValueError):
    pass


MODEL_KEYS = {f.name: f.type for f in dataclasses.fields(ModelParams)}
SIM_KEYS = {f.name: f.type for f in dataclasses.fields(SimConfig)}

# per-command keys with defaults; None means "required" or "derived"
COMMAND_KEYS: dict[str, dict[str, object]] = {
    "simulate": {"n_hops": 10, "eps_td": None, "xi_b": None, "xi_f": 0.0, "v_b": 0.0, "v_f": 0.0},
    "map": {"engine": "auto", "eps_min": 0.0, "eps_max": 50.0, "points": 101},
    "fixed-point": {"engine": "auto"},
    "bifurcate": {"engine": "auto", "parameter": "eps_inj", "start": None, "stop": None, "points": 100,
                  "transient": 500, "samples": 256, "tol": 1e-5, "seeds": None, "fixed_points": True},
    "basin": {"engine": "auto", "depth": 12, "resolution": 1e-6, "verify_samples": 0,
              "verify_max": 1000.0, "verify_iterations": 10000},
    "surface": {"eps_star": 10.0, "phi_min": 0.5, "phi_max": 3.0, "phi_points": 26,
                "kappa_min": 0.05, "kappa_max": 10.0, "kappa_points": 25, "kappa_spacing": "log"},
    "nondim": {"body_mass": None, "foot_mass": None, "ground_stiffness": None,
               "leg_stiffness_c": None, "unloaded_leg_length": None, "gravity": 9.81},
}


@dataclass
class RunConfig:
    command: str
    model: dict[str, str] = field(default_factory=dict)
    sim: dict[str, str] = field(default_factory=dict)
    options: dict[str, str] = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    seed: int = 0

    # -- typed views ---------------------------------------------------------

    def model_params(self) -> ModelParams:
        values = {}
        for key, raw in self.model.items():
            values[key] = _to_float(f"model.{key}", raw)
        try:
            return ModelParams(**values)
        except TypeError as exc:
            raise ConfigError(f"[model] is incomplete: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"[model] {exc}") from None

    def sim_config(self) -> SimConfig:
        values = {}
        for key, raw in self.sim.items():
            if key == "method":
                values[key] = raw
            elif key in ("max_events_per_hop", "max_hops", "grid_density"):
                values[key] = _to_int(f"sim.{key}", raw)
            else:
                values[key] = _to_float(f"sim.{key}", raw)
        try:
            return SimConfig(**values)
        except ValueError as exc:
            raise ConfigError(f"[sim] {exc}") from None

    def get(self, key: str, kind=str):
        default = COMMAND_KEYS[self.command][key]
        raw = self.options.get(key)
        if raw is None:
            return default
        name = f"{self.command}.{key}"
        if kind is float:
            return _to_float(name, raw)
        if kind is int:
            return _to_int(name, raw)
        if kind is bool:
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
        if kind is list:
            return [_to_float(name, part) for part in raw.split(",") if part.strip()]
        return raw.strip()

    def dimensional_spec(self) -> DimensionalSpec:
        values = {}
        for key in COMMAND_KEYS["nondim"]:
            v = self.get(key, float)
            if v is None:
                raise ConfigError(f"nondim.{key} is required")
            values[key] = v
        try:
            return DimensionalSpec(**values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def echo(self) -> dict[str, str]:
        """Flat ``section.key -> value`` view of everything that affects the result."""
        out = {}
        for k in sorted(self.model):
            out[f"model.{k}"] = self.model[k]
        for k in sorted(self.sim):
            out[f"sim.{k}"] = self.sim[k]
        for k in sorted(self.options):
            out[f"{self.command}.{k}"] = self.options[k]
        out["run.seed"] = str(self.seed)
        return out


def _to_float(name: str, raw: str) -> float:
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {raw!r}") from None
    if math.isnan(v):
        raise ConfigError(f"{name}: NaN is not allowed")
    return v


def _to_int(name: str, raw: str) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {raw!r}") from None


def _assign(cfg: RunConfig, section: str, key: str, value: str) -> None:
    key = key.strip()
    value = value.strip()
    if section == "model":
        if key not in MODEL_KEYS:
            raise ConfigError(f"unknown key model.{key}")
        cfg.model[key] = value
    elif section == "sim":
        if key not in SIM_KEYS:
            raise ConfigError(f"unknown key sim.{key}")
        cfg.sim[key] = value
    elif section in COMMAND_KEYS:
        if key not in COMMAND_KEYS[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        if section == cfg.command:
            cfg.options[key] = value
    else:
        raise ConfigError(f"unknown section [{section}]")


def load_config(command: str, path: str | None = None, overrides: list[str] | None = None) -> RunConfig:
    """Read ``path`` (if any) and apply ``section.key=value`` overrides."""
    if command not in COMMAND_KEYS:
        raise ConfigError(f"unknown command {command!r}")
    cfg = RunConfig(command)
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        for section in parser.sections():
            for key, value in parser.items(section):
                _assign(cfg, section, key, value)
    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        lhs, value = item.split("=", 1)
        section, key = lhs.split(".", 1)
        _assign(cfg, section.strip(), key, value)
    return cfg
