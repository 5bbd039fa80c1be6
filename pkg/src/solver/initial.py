"""Initial data presets: (u0, v0) sampled on the grid nodes."""
from __future__ import annotations

from typing import Callable, Dict, Tuple

import numpy as np

from src.errors import ConfigError
from src.solver.grid import Grid1D

InitialData = Tuple[np.ndarray, np.ndarray]


def zero(grid: Grid1D) -> InitialData:
    return np.zeros(grid.M), np.zeros(grid.M)


def affine(grid: Grid1D, a: float = 0.0, b: float = 0.0) -> InitialData:
    """u0 = a + b*x at rest; exact for every scheme in the library."""
    return a + b * grid.nodes, np.zeros(grid.M)


def sine(grid: Grid1D, k: int = 1, amplitude: float = 1.0) -> InitialData:
    """Right-moving wave A*sin(2*pi*k*(x - x0)/L) over the grid length L."""
    wavenumber = 2 * np.pi * k / grid.length
    phase = wavenumber * (grid.nodes - grid.x0)
    return amplitude * np.sin(phase), -amplitude * wavenumber * np.cos(phase)


def gaussian(grid: Grid1D, center: float = 0.5, width: float = 0.1, amplitude: float = 1.0) -> InitialData:
    bump = amplitude * np.exp(-((grid.nodes - center) / width) ** 2)
    return bump, np.zeros(grid.M)


def random_smooth(grid: Grid1D, seed: int = 0, amplitude: float = 0.05, modes: int = 4) -> InitialData:
    """A few low Fourier modes with random phases; deterministic for a seed."""
    rng = np.random.default_rng(seed)
    phase = 2 * np.pi * (grid.nodes - grid.x0) / grid.length
    u0 = np.zeros(grid.M)
    v0 = np.zeros(grid.M)
    for k in range(1, modes + 1):
        a, b, c, d = rng.uniform(-1.0, 1.0, size=4) * amplitude / k ** 2
        u0 += a * np.sin(k * phase) + b * np.cos(k * phase)
        v0 += c * np.sin(k * phase) + d * np.cos(k * phase)
    return u0, v0


PRESETS: Dict[str, Callable[..., InitialData]] = {
    "zero": zero,
    "affine": affine,
    "sine": sine,
    "gaussian": gaussian,
    "random_smooth": random_smooth,
}


def make_initial_data(name: str, grid: Grid1D, **params) -> InitialData:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown initial condition {name!r}; known: {', '.join(PRESETS)}") from None
    return preset(grid, **params)
