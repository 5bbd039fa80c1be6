"""Multiplier search, scheme synthesis and density/flux reconstruction.

All three reduce to linear algebra over QQ: the unknowns are the
coefficients of an ansatz, the equations are the coefficients of the
monomials that a candidate expression produces.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from src.errors import AnsatzError, InfeasibleError, StencilError
from src.stencil.diffpoly import (
    DiffPoly,
    H_VAR,
    T_VAR,
    TAU_VAR,
    X_VAR,
    VarKind,
    grid_var,
    monomial_from,
    step_exponents,
)
from src.stencil.linsolve import combine, nullspace, solve_affine
from src.stencil.operators import Direction, diff_op, euler_op, total_divergence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnsatzSpec:
    """A finite list of linearly independent DiffPoly basis elements."""
    name: str
    basis: Tuple[DiffPoly, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.basis:
            raise AnsatzError(f"ansatz {self.name!r} has an empty basis")
        if self.labels and len(self.labels) != len(self.basis):
            raise AnsatzError(f"ansatz {self.name!r}: {len(self.labels)} labels for {len(self.basis)} elements")
        if nullspace(list(self.basis)):
            raise AnsatzError(f"ansatz {self.name!r} has linearly dependent basis elements")

    def __len__(self) -> int:
        return len(self.basis)

    def combine(self, coefficients) -> DiffPoly:
        return combine(coefficients, self.basis)


def find_multipliers(residual: DiffPoly, ansatz: AnsatzSpec) -> List[DiffPoly]:
    """Basis of all ansatz combinations Lambda with euler_op(Lambda * residual) == 0."""
    columns = [euler_op(b * residual) for b in ansatz.basis]
    found = []
    for vector in nullspace(columns):
        multiplier = ansatz.combine(vector)
        if not euler_op(multiplier * residual).is_zero():
            raise StencilError(f"multiplier {multiplier} failed the Euler check")
        found.append(multiplier)
    logger.info("[MULTIPLIERS] ansatz=%s size=%d found=%d", ansatz.name, len(ansatz), len(found))
    return found


def solve_scheme_coefficients(ansatz: AnsatzSpec, multiplier: DiffPoly) -> List[DiffPoly]:
    """Basis of residuals F in the ansatz span for which multiplier * F is a divergence."""
    columns = [euler_op(multiplier * b) for b in ansatz.basis]
    family = [ansatz.combine(v) for v in nullspace(columns)]
    logger.info("[SYNTHESIS] ansatz=%s multiplier=%s family=%d", ansatz.name, multiplier, len(family))
    return family


@dataclass(frozen=True)
class DensityFluxBounds:
    """Search bounds for :func:`find_density_flux`.

    Unset fields are derived from the polynomial being reconstructed: its
    grid degrees, its stencil extent, coordinate degree at most one and, for
    each step size, exponents from the lowest one in the input up to one above
    the highest. With ``compact`` set and no explicit windows, grid monomials
    are first limited to those whose stencil box, or its backward shift in t
    or x, fits inside the box of a single input term; the full window is the
    fallback.
    """
    degrees: Optional[Tuple[int, ...]] = None
    time_window: Optional[Tuple[int, int]] = None
    space_window: Optional[Tuple[int, int]] = None
    coord_degree: int = 1
    h_range: Optional[Tuple[int, int]] = None
    tau_range: Optional[Tuple[int, int]] = None
    compact: bool = True


def _grid_monomials(degree: int, time_window, space_window) -> List[dict]:
    points = [grid_var(k, l) for k in range(time_window[0], time_window[1] + 1)
              for l in range(space_window[0], space_window[1] + 1)]
    out = []
    for combo in itertools.combinations_with_replacement(points, degree):
        exps = {}
        for v in combo:
            exps[v] = exps.get(v, 0) + 1
        out.append(exps)
    return out


def _factor_monomials(weight: int, coord_degree: int, h_range, tau_range) -> List[dict]:
    out = []
    for a in range(coord_degree + 1):
        for b in range(coord_degree + 1 - a):
            for eh in range(h_range[0], h_range[1] + 1):
                et = weight - a - b - eh
                if tau_range[0] <= et <= tau_range[1]:
                    out.append({T_VAR: a, X_VAR: b, H_VAR: eh, TAU_VAR: et})
    return out


def _step_range(p: DiffPoly, which: int) -> Tuple[int, int]:
    exps = [step_exponents(m)[which] for m in p.terms]
    return min(exps), max(exps) + 1


Box = Tuple[int, int, int, int]


def _box(exps) -> Optional[Box]:
    points = [(v.k, v.l) for v in exps if v.kind == VarKind.GRID]
    if not points:
        return None
    ks, ls = zip(*points)
    return min(ks), max(ks), min(ls), max(ls)


def _inside(inner: Box, outer: Box) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1] and outer[2] <= inner[2] and inner[3] <= outer[3]


def _fits_some_term(box: Optional[Box], term_boxes: Set[Box]) -> bool:
    if box is None:
        return True
    k0, k1, l0, l1 = box
    shapes = (box, (k0 - 1, k1 - 1, l0, l1), (k0, k1, l0 - 1, l1 - 1))
    return any(_inside(s, outer) for s in shapes for outer in term_boxes)


def _candidates(p: DiffPoly, bounds: DensityFluxBounds, compact: bool = False) -> List[DiffPoly]:
    kmin, kmax, lmin, lmax = p.grid_extent() or (0, 0, 0, 0)
    time_window = bounds.time_window or (kmin, kmax)
    space_window = bounds.space_window or (lmin, lmax)
    h_range = bounds.h_range or _step_range(p, 0)
    tau_range = bounds.tau_range or _step_range(p, 1)
    degrees = bounds.degrees or tuple(sorted(p.grid_degrees()))
    weights = sorted({w + 1 for w in p.coordinate_weights()})
    term_boxes = {b for b in (_box(dict(m)) for m in p.terms) if b is not None}
    seen = set()
    out = []
    for d in degrees:
        grids = _grid_monomials(d, time_window, space_window)
        if compact:
            grids = [g for g in grids if _fits_some_term(_box(g), term_boxes)]
        for w in weights:
            for factor in _factor_monomials(w, bounds.coord_degree, h_range, tau_range):
                for g in grids:
                    m = monomial_from({**g, **factor})
                    if m not in seen:
                        seen.add(m)
                        out.append(DiffPoly({m: 1}))
    return out


def find_density_flux(p: DiffPoly, bounds: Optional[DensityFluxBounds] = None) -> Tuple[DiffPoly, DiffPoly]:
    """Write a divergence-form polynomial as D_-tau(density) + D_-h(flux).

    The ansatz is homogeneous: shifts keep both the grid degree and the
    coordinate weight (degree in t, x, h, tau), and each backward difference
    lowers the weight by one, so only matching monomials are tried.
    """
    if p.is_zero():
        return DiffPoly.zero(), DiffPoly.zero()
    if not euler_op(p).is_zero():
        raise InfeasibleError("polynomial is not in divergence form")
    bounds = bounds or DensityFluxBounds()
    attempts = [False]
    if bounds.compact and bounds.time_window is None and bounds.space_window is None:
        attempts.insert(0, True)
    for compact in attempts:
        monomials = _candidates(p, bounds, compact)
        columns = [diff_op(m, Direction.MINUS_TAU) for m in monomials] + \
                  [diff_op(m, Direction.MINUS_H) for m in monomials]
        logger.debug("[DENSITY_FLUX] unknowns=%d compact=%s", len(columns), compact)
        particular, _ = solve_affine(columns, p)
        if particular is not None:
            break
    else:
        raise InfeasibleError(f"no density/flux pair within bounds {bounds}")
    n = len(monomials)
    density = combine(particular[:n], monomials)
    flux = combine(particular[n:], monomials)
    if total_divergence(density, flux) != p:
        raise StencilError("reconstructed density/flux does not reproduce the input")
    return density, flux
