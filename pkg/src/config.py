"""Run configuration: key=value files read with python-dotenv, CLI overrides on top."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from typing import Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from src.errors import ConfigError
from src.schemes.ansatz import ansatz_names
from src.schemes.library import scheme_names
from src.solver.grid import DIRICHLET, PERIODIC, BoundaryCondition, Grid1D
from src.solver.initial import PRESETS, make_initial_data

logger = logging.getLogger(__name__)

DEFAULT_M = 128


@dataclass(frozen=True)
class RunConfig:
    scheme: str = "LinearCross"
    M: int = DEFAULT_M
    h: Optional[float] = None
    tau: Optional[float] = None
    steps: int = 100
    bc: str = PERIODIC
    left: float = 0.0
    right: float = 0.0
    x0: float = 0.0
    ic: str = "random_smooth"
    ic_a: float = 0.0
    ic_b: float = 0.0
    ic_k: int = 1
    ic_amplitude: Optional[float] = None
    ic_center: float = 0.5
    ic_width: float = 0.1
    ic_seed: int = 0
    stride: int = 1
    out: Optional[str] = None
    out_format: str = "csv"
    ansatz: str = "cross5_linear"
    tolerance: float = 1e-10
    levels: Tuple[int, ...] = (32, 64, 128, 256)
    final_time: float = 0.5
    window_start: Optional[int] = None
    window_length: Optional[int] = None
    jobs: int = 1

    @property
    def spacing(self) -> float:
        if self.h is not None:
            return self.h
        cells = self.M if self.bc == PERIODIC else self.M + 1
        return 1.0 / cells

    @property
    def time_step(self) -> float:
        return self.tau if self.tau is not None else 0.5 * self.spacing


_FIELDS = {f.name: f for f in fields(RunConfig)}


_INT_KEYS = {"M", "steps", "ic_k", "ic_seed", "stride", "window_start", "window_length", "jobs"}
_FLOAT_KEYS = {"h", "tau", "left", "right", "x0", "ic_a", "ic_b", "ic_amplitude", "ic_center", "ic_width",
               "tolerance", "final_time"}


def _convert(key: str, raw) -> object:
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        return None
    try:
        if key == "levels":
            values = raw if isinstance(raw, (list, tuple)) else str(raw).replace(";", ",").split(",")
            return tuple(int(v) for v in values if str(v).strip())
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None
    return str(raw).strip()


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.scheme not in scheme_names():
        raise ConfigError(f"unknown scheme {cfg.scheme!r}; known: {', '.join(scheme_names())}")
    if cfg.bc not in (PERIODIC, DIRICHLET):
        raise ConfigError(f"bc must be periodic or dirichlet, got {cfg.bc!r}")
    if cfg.ic not in PRESETS:
        raise ConfigError(f"unknown ic {cfg.ic!r}; known: {', '.join(PRESETS)}")
    if cfg.ansatz not in ansatz_names():
        raise ConfigError(f"unknown ansatz {cfg.ansatz!r}; known: {', '.join(ansatz_names())}")
    if cfg.out_format not in ("csv", "bin"):
        raise ConfigError(f"out_format must be csv or bin, got {cfg.out_format!r}")
    if cfg.M < 3:
        raise ConfigError(f"M must be at least 3, got {cfg.M}")
    for name in ("h", "tau"):
        value = getattr(cfg, name)
        if value is not None and value <= 0:
            raise ConfigError(f"{name} must be positive, got {value}")
    if cfg.steps < 0:
        raise ConfigError(f"steps must be non-negative, got {cfg.steps}")
    for name in ("stride", "jobs"):
        if getattr(cfg, name) < 1 and not (name == "jobs" and cfg.jobs == -1):
            raise ConfigError(f"{name} must be at least 1, got {getattr(cfg, name)}")
    if cfg.tolerance <= 0 or cfg.final_time <= 0:
        raise ConfigError("tolerance and final_time must be positive")
    if len(cfg.levels) < 2 or any(m < 3 for m in cfg.levels):
        raise ConfigError(f"levels needs at least two grid sizes >= 3, got {cfg.levels}")
    return cfg


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, object]] = None) -> RunConfig:
    """Read a key=value file (if given) and apply overrides; unknown keys are errors."""
    values: Dict[str, object] = {}
    if path:
        if not os.path.isfile(path) or not os.access(path, os.R_OK):
            raise ConfigError(f"config file not found or unreadable: {path}")
        file_values = dotenv_values(path)
        if not file_values:
            logger.warning("[CONFIG] %s is empty", path)
        values.update(file_values)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    unknown = sorted(k for k in values if k not in _FIELDS)
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}")
    converted = {}
    for key, raw in values.items():
        value = _convert(key, raw)
        if value is not None:
            converted[key] = value
    cfg = _validate(replace(RunConfig(), **converted))
    logger.debug("[CONFIG] %s", cfg)
    return cfg


def build_grid(cfg: RunConfig) -> Grid1D:
    bc = BoundaryCondition(cfg.bc, cfg.left, cfg.right)
    return Grid1D(cfg.M, cfg.spacing, cfg.time_step, bc, cfg.x0)


def initial_params(cfg: RunConfig) -> Dict[str, object]:
    """Keyword arguments of the configured initial-data preset."""
    params: Dict[str, object] = {}
    if cfg.ic == "affine":
        params = {"a": cfg.ic_a, "b": cfg.ic_b}
    elif cfg.ic == "sine":
        params = {"k": cfg.ic_k}
        if cfg.ic_amplitude is not None:
            params["amplitude"] = cfg.ic_amplitude
    elif cfg.ic == "gaussian":
        params = {"center": cfg.ic_center, "width": cfg.ic_width}
        if cfg.ic_amplitude is not None:
            params["amplitude"] = cfg.ic_amplitude
    elif cfg.ic == "random_smooth":
        params = {"seed": cfg.ic_seed}
        if cfg.ic_amplitude is not None:
            params["amplitude"] = cfg.ic_amplitude
    return params


def build_initial_data(cfg: RunConfig, grid: Grid1D):
    return make_initial_data(cfg.ic, grid, **initial_params(cfg))
