"""Time stepping by solving the scheme residual for the upper level.

Every scheme in the library is linear in the values at level n+1, so
F = sum_l A_l * U[1,l] + G with A_l and G free of level n+1. Explicit
schemes only have A_0; the nine-point scheme couples neighbours and needs a
(cyclic) tridiagonal solve.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Union

import numpy as np

from src.config import build_grid, build_initial_data
from src.errors import NonFiniteStateError, SolverError
from src.kernels import Kernel
from src.schemes.library import Scheme, StepperKind, get_scheme
from src.solver.grid import Grid1D, SolutionState, Trajectory
from src.solver.tridiag import solve_tridiagonal_cyclic
from src.stencil.diffpoly import DiffPoly
from src.stencil.operators import substitute

logger = logging.getLogger(__name__)

Profile = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class UpperLevelSplit:
    coefficients: Dict[int, Kernel]
    remainder: Kernel
    residual: Kernel


@lru_cache(maxsize=None)
def split_upper_level(scheme_name: str) -> UpperLevelSplit:
    scheme = get_scheme(scheme_name)
    F = scheme.residual
    upper = sorted(v for v in F.grid_vars() if v.k == 1)
    if any(v.k > 1 for v in F.grid_vars()):
        raise SolverError(f"{scheme_name} reaches beyond level n+1")
    coefficients = {}
    for v in upper:
        a = F.diff(v)
        if any(w.k == 1 for w in a.grid_vars()):
            raise SolverError(f"{scheme_name} is not linear in the upper level")
        coefficients[v.l] = Kernel(a)
    remainder = substitute(F, {v: DiffPoly.zero() for v in upper})
    if scheme.stepper.explicit and set(coefficients) != {0}:
        raise SolverError(f"{scheme_name} is declared explicit but couples {sorted(coefficients)}")
    return UpperLevelSplit(coefficients, Kernel(remainder), Kernel(F))


def _sample(profile: Profile, x: np.ndarray) -> np.ndarray:
    values = profile(x) if callable(profile) else profile
    values = np.asarray(values, dtype=float)
    if values.shape != x.shape:
        raise SolverError(f"initial profile has shape {values.shape}, expected {x.shape}")
    return values


def init_state(grid: Grid1D, u0: Profile, v0: Profile, scheme: Scheme) -> SolutionState:
    """Levels 0 and 1 from position and velocity via a second-order Taylor start.

    U^1 = u0 + tau*v0 + tau^2/2 * (1 + c*u0_x^2) * u0_xx, with c = 1 for the
    nonlinear equation, derivatives by centred differences.
    """
    x = grid.nodes
    layer0 = _sample(u0, x)
    velocity = _sample(v0, x)
    right, left = grid.shifted(layer0, 1), grid.shifted(layer0, -1)
    ux = (right - left) / (2 * grid.h)
    uxx = (right - 2 * layer0 + left) / grid.h ** 2
    c = 1.0 if scheme.equation == "nonlinear" else 0.0
    layer1 = layer0 + grid.tau * velocity + 0.5 * grid.tau ** 2 * (1 + c * ux ** 2) * uxx
    return SolutionState(1, layer0, layer1)


def step(state: SolutionState, scheme: Scheme, grid: Grid1D) -> SolutionState:
    split = split_upper_level(scheme.name)
    layers = {state.n - 1: state.prev, state.n: state.curr}
    t = state.n * grid.tau
    a = {l: k.evaluate(layers.__getitem__, grid, state.n, t) for l, k in split.coefficients.items()}
    rhs = -split.remainder.evaluate(layers.__getitem__, grid, state.n, t)
    if set(a) == {0}:
        if np.any(a[0] == 0):
            raise SolverError("zero coefficient on the upper level")
        upper = rhs / a[0]
    else:
        zeros = np.zeros(grid.M)
        sub, diag, sup = a.get(-1, zeros), a.get(0, zeros), a.get(1, zeros)
        if grid.periodic:
            upper = solve_tridiagonal_cyclic(sub, diag, sup, (sub[0], sup[-1]), rhs)
        else:
            rhs = rhs.copy()
            rhs[0] -= sub[0] * grid.bc.left
            rhs[-1] -= sup[-1] * grid.bc.right
            upper = solve_tridiagonal_cyclic(sub, diag, sup, None, rhs)
    if not np.all(np.isfinite(upper)):
        raise NonFiniteStateError(f"{scheme.name}: non-finite values at level {state.n + 1}")
    return SolutionState(state.n + 1, state.curr, upper)


def step_residual(state: SolutionState, previous: np.ndarray, scheme: Scheme, grid: Grid1D):
    """Residual of F centred at level state.n - 1 after a step, with its term magnitude."""
    split = split_upper_level(scheme.name)
    n = state.n - 1
    layers = {n - 1: previous, n: state.prev, n + 1: state.curr}
    return split.residual.evaluate(layers.__getitem__, grid, n, n * grid.tau, with_magnitude=True)


def integrate(scheme: Scheme, grid: Grid1D, state: SolutionState, steps: int, stride: int = 1,
              metadata: Optional[dict] = None) -> Trajectory:
    """Advance to level ``steps``, storing every ``stride``-th level.

    The starting levels from ``init_state`` are kept; ``steps=0`` returns just those.
    """
    if steps < 0:
        raise SolverError(f"steps must be non-negative, got {steps}")
    if stride < 1:
        raise SolverError(f"stride must be at least 1, got {stride}")
    levels, layers = [], []
    if (state.n - 1) % stride == 0:
        levels.append(state.n - 1)
        layers.append(state.prev.copy())
    if state.n % stride == 0:
        levels.append(state.n)
        layers.append(state.curr.copy())
    while state.n < steps:
        state = step(state, scheme, grid)
        if state.n % stride == 0:
            levels.append(state.n)
            layers.append(state.curr.copy())
        if state.n % 1000 == 0:
            logger.debug("[SOLVER] %s level %d of %d", scheme.name, state.n, steps)
    logger.info("[SOLVER] %s: %d steps on M=%d (%s), stored %d levels",
                scheme.name, steps, grid.M, grid.bc.kind, len(levels))
    return Trajectory(grid, scheme.name, np.array(layers), np.array(levels), 0.0, dict(metadata or {}))


def run(config) -> Trajectory:
    """Build grid and initial data from a RunConfig and integrate."""
    scheme = get_scheme(config.scheme)
    grid = build_grid(config)
    u0, v0 = build_initial_data(config, grid)
    state = init_state(grid, u0, v0, scheme)
    meta = {"ic": config.ic, "steps": config.steps, "stride": config.stride}
    return integrate(scheme, grid, state, config.steps, config.stride, meta)

