"""Numeric evaluation of DiffPoly expressions on grid layers.

Before compiling, every grid value U[k,l] is rewritten exactly as
D[k,l] + C, where C = U[0,0] is the value at the centre node and D[k,l] the
difference to it. Gauge-invariant expressions such as (U[1,0] - U[0,0])/tau
then lose every C term symbolically, and the floating point evaluation works
on small differences instead of cancelling large values.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from src.errors import SolverError
from src.stencil.diffpoly import DiffPoly, VarKind, aux, aux_var
from src.stencil.operators import substitute

logger = logging.getLogger(__name__)

CENTER = aux_var("center")
LayerSource = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class _Term:
    coef: float
    diffs: Tuple[Tuple[int, int, int], ...]
    center: int
    t: int
    x: int
    h: int
    tau: int


class Kernel:
    """A compiled DiffPoly; evaluate it with :meth:`evaluate`."""

    def __init__(self, poly: DiffPoly):
        self.poly = poly
        extent = poly.grid_extent() or (0, 0, 0, 0)
        self.time_offsets = (extent[0], extent[1])
        self.space_offsets = (extent[2], extent[3])
        others = {v for v in poly.variables() if v.kind == VarKind.AUX}
        if others:
            raise SolverError(f"cannot compile symbols {sorted(str(v) for v in others)}")
        centred = substitute(poly, {
            v: (DiffPoly.variable(v) if (v.k, v.l) != (0, 0) else DiffPoly.zero()) + aux("center")
            for v in poly.grid_vars()
        })
        self.terms: List[_Term] = []
        for m, c in centred.items():
            diffs, powers = [], {"center": 0, "t": 0, "x": 0, "h": 0, "tau": 0}
            for v, e in m:
                if v.kind == VarKind.GRID:
                    diffs.append((v.k, v.l, e))
                elif v == CENTER:
                    powers["center"] = e
                else:
                    powers[{VarKind.T: "t", VarKind.X: "x", VarKind.H: "h", VarKind.TAU: "tau"}[v.kind]] = e
            self.terms.append(_Term(float(c), tuple(diffs), powers["center"], powers["t"], powers["x"],
                                    powers["h"], powers["tau"]))
        logger.debug("[KERNEL] compiled %d terms into %d centred terms", len(poly), len(self.terms))

    def levels_needed(self, n: int) -> Tuple[int, int]:
        return n + self.time_offsets[0], n + self.time_offsets[1]

    def evaluate(self, layer_at: LayerSource, grid, n: int, t: float, with_magnitude: bool = False):
        """Values at every node of level n; optionally also the sum of |term|."""
        centre = np.asarray(layer_at(n), dtype=float)
        x = grid.nodes
        cache = {}

        def diff(k: int, l: int) -> np.ndarray:
            key = (k, l)
            if key not in cache:
                cache[key] = grid.shifted(np.asarray(layer_at(n + k), dtype=float), l) - centre
            return cache[key]

        total = np.zeros(grid.M)
        magnitude = np.zeros(grid.M)
        for term in self.terms:
            scale = term.coef * grid.h ** term.h * grid.tau ** term.tau * t ** term.t
            value = np.full(grid.M, scale)
            for k, l, e in term.diffs:
                value = value * diff(k, l) ** e
            if term.center:
                value = value * centre ** term.center
            if term.x:
                value = value * x ** term.x
            total += value
            if with_magnitude:
                magnitude += np.abs(value)
        if with_magnitude:
            return total, magnitude
        return total


def compile_kernel(poly: DiffPoly) -> Kernel:
    return Kernel(poly)


def relative_residual(values: np.ndarray, magnitude: np.ndarray) -> float:
    """max|values| / max(magnitude), with 0/0 read as 0."""
    num = float(np.max(np.abs(values))) if values.size else 0.0
    den = float(np.max(magnitude)) if magnitude.size else 0.0
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return float("inf")
    return num / den
