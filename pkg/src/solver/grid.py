"""Uniform 1-D grids, solution states and trajectories."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from src.errors import DimensionError, NonFiniteStateError, SolverError

PERIODIC = "periodic"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str = PERIODIC
    left: float = 0.0
    right: float = 0.0

    def __post_init__(self):
        if self.kind not in (PERIODIC, DIRICHLET):
            raise SolverError(f"unknown boundary condition {self.kind!r}")

    @property
    def periodic(self) -> bool:
        return self.kind == PERIODIC


@dataclass(frozen=True)
class Grid1D:
    """M unknown nodes with spacing h, time step tau.

    Periodic grids have nodes x0 + m*h for m in [0, M). Dirichlet grids have
    interior nodes x0 + (m+1)*h with fixed values at x0 and x0 + (M+1)*h.
    """
    M: int
    h: float
    tau: float
    bc: BoundaryCondition = field(default_factory=BoundaryCondition)
    x0: float = 0.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 3:
            raise DimensionError(f"grid needs at least 3 nodes, got M={self.M}")
        for name in ("h", "tau"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise SolverError(f"{name} must be positive and finite, got {value}")

    @property
    def periodic(self) -> bool:
        return self.bc.periodic

    @property
    def nodes(self) -> np.ndarray:
        offset = 0 if self.periodic else 1
        return self.x0 + self.h * (np.arange(self.M) + offset)

    @property
    def length(self) -> float:
        return self.M * self.h if self.periodic else (self.M + 1) * self.h

    def shifted(self, layer: np.ndarray, l: int) -> np.ndarray:
        """Values at node m + l for every node m."""
        if l == 0:
            return layer
        if self.periodic:
            return np.roll(layer, -l)
        w = abs(l)
        padded = np.concatenate([np.full(w, self.bc.left), layer, np.full(w, self.bc.right)])
        return padded[w + l: w + l + self.M]

    def valid_nodes(self, lmin: int, lmax: int) -> np.ndarray:
        """Mask of nodes whose stencil [m+lmin, m+lmax] stays on the grid."""
        if self.periodic:
            return np.ones(self.M, dtype=bool)
        m = np.arange(self.M)
        return (m + lmin >= -1) & (m + lmax <= self.M)


@dataclass
class SolutionState:
    """Two consecutive time levels: prev at n-1 and curr at n."""
    n: int
    prev: np.ndarray
    curr: np.ndarray

    def __post_init__(self):
        self.prev = np.asarray(self.prev, dtype=float)
        self.curr = np.asarray(self.curr, dtype=float)
        if self.prev.shape != self.curr.shape:
            raise DimensionError(f"layer shapes differ: {self.prev.shape} vs {self.curr.shape}")
        if not (np.all(np.isfinite(self.prev)) and np.all(np.isfinite(self.curr))):
            raise NonFiniteStateError(f"non-finite values in state at level {self.n}")


@dataclass
class Trajectory:
    """Stored time levels of one run; ``layers[i]`` is the layer at ``levels[i]``."""
    grid: Grid1D
    scheme: str
    layers: np.ndarray
    levels: np.ndarray
    t0: float = 0.0
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.layers = np.atleast_2d(np.asarray(self.layers, dtype=float))
        self.levels = np.asarray(self.levels, dtype=int)
        if self.layers.shape != (len(self.levels), self.grid.M):
            raise DimensionError(
                f"layers shape {self.layers.shape} does not match {len(self.levels)} levels x M={self.grid.M}"
            )

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def contiguous(self) -> bool:
        return len(self.levels) < 2 or bool(np.all(np.diff(self.levels) == 1))

    def time(self, n: int) -> float:
        return self.t0 + n * self.grid.tau

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.levels * self.grid.tau

    def layer(self, n: int) -> np.ndarray:
        idx = n - int(self.levels[0])
        if self.contiguous and 0 <= idx < len(self.levels):
            return self.layers[idx]
        hits = np.nonzero(self.levels == n)[0]
        if not len(hits):
            raise SolverError(f"level {n} is not stored in this trajectory")
        return self.layers[hits[0]]

    def level_range(self) -> Tuple[int, int]:
        return int(self.levels[0]), int(self.levels[-1])

    def with_layers(self, layers: np.ndarray, grid: Optional[Grid1D] = None, t0: Optional[float] = None) -> "Trajectory":
        return Trajectory(grid or self.grid, self.scheme, layers, self.levels.copy(),
                          self.t0 if t0 is None else t0, dict(self.metadata))
