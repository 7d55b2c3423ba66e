"""Run configuration shared by the command-line front end."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import yaml

from .model import T_MIN, BathSpec, ModelError, QubitBloch, qubit_from_polar
from .quadrature import QuadratureConfig


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    # bath
    kappa: float = 1e-3
    omega_c: float = 1.0
    temperature: float = 1.0
    temperatures: list | None = None
    T_min: float = 0.05
    T_max: float = 10.0
    T_count: int = 200
    T_spacing: str = "log"
    # time axis
    t_min: float = 1e-2
    t_max: float = 1e4
    t_count: int = 400
    t_spacing: str = "log"
    # qubit
    r: float = 0.98
    z: float = 0.0
    phi: float = 0.0
    x: float | None = None
    y: float | None = None
    omega_q: float = 0.0
    # quadrature
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    # single mode
    g: float = 0.2
    omega: float = 1.0
    n_trunc: int | None = None
    periods: float = 2.0
    n_grid: int = 2000
    # Bloch-ball cuts and Monte Carlo
    z_count: int = 81
    z_max: float = 0.99
    mc_samples: int = 1_000_000
    seed: int = 0
    tau_dec: bool = False
    # output
    out: str | None = None
    format: str = "csv"
    threads: int = 1

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in fields(cls)}

    def updated(self, values: dict) -> "RunConfig":
        unknown = set(values) - self.field_names()
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(name, "unknown configuration key")
        return dataclasses.replace(self, **values)

    def validate(self) -> "RunConfig":
        for name in ("kappa", "omega_c", "temperature", "T_min", "T_max", "t_max",
                     "rel_tol", "abs_tol", "omega", "periods"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be a positive number, got {value!r}")
        if self.t_min < 0:
            raise ConfigError("t_min", "must be >= 0")
        if self.g < 0:
            raise ConfigError("g", "must be >= 0")
        for name in ("T_count", "t_count", "z_count", "mc_samples", "max_subdivisions", "n_grid"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if self.threads < 0:
            raise ConfigError("threads", "must be >= 0")
        for name in ("T_spacing", "t_spacing"):
            if getattr(self, name) not in ("log", "linear"):
                raise ConfigError(name, "must be 'log' or 'linear'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", "must be 'csv' or 'json'")
        if self.T_min < T_MIN:
            raise ConfigError("T_min", f"must be >= {T_MIN}")
        if self.T_max < self.T_min:
            raise ConfigError("T_max", "must be >= T_min")
        if self.t_max < self.t_min:
            raise ConfigError("t_max", "must be >= t_min")
        if self.t_spacing == "log" and self.t_min == 0:
            raise ConfigError("t_min", "must be positive for log spacing")
        if self.temperatures is not None:
            if not self.temperatures or any(not T >= T_MIN for T in self.temperatures):
                raise ConfigError("temperatures", f"must be a nonempty list of values >= {T_MIN}")
        if not 0 < self.z_max < 1:
            raise ConfigError("z_max", "must lie in (0, 1)")
        self.state()
        return self

    # derived objects

    def bath(self, temperature: float | None = None) -> BathSpec:
        T = self.temperature if temperature is None else temperature
        try:
            return BathSpec(self.kappa, self.omega_c, float(T))
        except ModelError as exc:
            raise ConfigError("kappa/omega_c/temperature", str(exc)) from exc

    def state(self) -> QubitBloch:
        try:
            if self.x is not None or self.y is not None:
                return QubitBloch(self.x or 0.0, self.y or 0.0, self.z)
            return qubit_from_polar(self.r, self.z, self.phi)
        except ModelError as exc:
            raise ConfigError("r/z/phi", str(exc)) from exc

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(self.rel_tol, self.abs_tol, self.max_subdivisions)

    def T_axis(self) -> np.ndarray:
        if self.temperatures is not None:
            return np.array(sorted(float(T) for T in self.temperatures))
        return _axis(self.T_min, self.T_max, self.T_count, self.T_spacing)

    def t_axis(self) -> np.ndarray:
        return _axis(self.t_min, self.t_max, self.t_count, self.t_spacing)


def _axis(lo: float, hi: float, n: int, spacing: str) -> np.ndarray:
    if n == 1:
        return np.array([float(lo)])
    if spacing == "log":
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def load_config_file(path: str | Path) -> dict:
    """Read a YAML (or JSON) mapping of RunConfig keys."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}
