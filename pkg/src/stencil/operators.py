"""Shift, difference and Euler operators on DiffPoly."""
from __future__ import annotations

import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, Mapping

from src.errors import StencilError
from src.stencil.diffpoly import (
    DEFAULT_WINDOW,
    H,
    H_INV,
    TAU,
    TAU_INV,
    DiffPoly,
    LaurentPoly,
    Monomial,
    StencilVar,
    VarKind,
    grid_var,
    monomial_from,
)

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    PLUS_H = "+h"
    MINUS_H = "-h"
    PLUS_TAU = "+tau"
    MINUS_TAU = "-tau"


def substitute(p: LaurentPoly, mapping: Mapping[StencilVar, LaurentPoly]) -> LaurentPoly:
    """Replace variables by polynomials, exactly.

    Variables absent from ``mapping`` are kept. A variable raised to a negative
    power can only be kept, never replaced.
    """
    cls = type(p)
    one = cls.constant(1)
    powers: Dict[tuple, LaurentPoly] = {}

    def power(v: StencilVar, e: int) -> LaurentPoly:
        key = (v, e)
        if key not in powers:
            if e < 0:
                raise StencilError(f"cannot substitute into {v}^{e}")
            powers[key] = mapping[v] ** e
        return powers[key]

    out: Dict[Monomial, Fraction] = {}
    for m, c in p.terms.items():
        kept = {}
        factor = one
        for v, e in m:
            if v in mapping:
                factor = factor * power(v, e)
            else:
                kept[v] = e
        rest = monomial_from(kept)
        for fm, fc in factor.terms.items():
            key = monomial_from(_merge(rest, fm)) if rest else fm
            out[key] = out.get(key, 0) + c * fc
    return cls._raw(out)


def _merge(a: Monomial, b: Monomial) -> Dict[StencilVar, int]:
    merged = dict(a)
    for v, e in b:
        merged[v] = merged.get(v, 0) + e
    return merged


def shift(p: DiffPoly, dk: int, dl: int, window: int = DEFAULT_WINDOW) -> DiffPoly:
    """Move every grid value by (dk, dl); t and x move with the node."""
    if dk == 0 and dl == 0:
        return p
    mapping: Dict[StencilVar, LaurentPoly] = {}
    renames: Dict[StencilVar, StencilVar] = {}
    for v in p.variables():
        if v.kind == VarKind.GRID:
            renames[v] = grid_var(v.k + dk, v.l + dl, window)
        elif v.kind == VarKind.T and dk:
            mapping[v] = DiffPoly.variable(v) + TAU * dk
        elif v.kind == VarKind.X and dl:
            mapping[v] = DiffPoly.variable(v) + H * dl
    renamed = DiffPoly._raw({
        monomial_from({renames.get(v, v): e for v, e in m}): c for m, c in p.terms.items()
    })
    return substitute(renamed, mapping) if mapping else renamed


def diff_op(p: DiffPoly, direction: Direction) -> DiffPoly:
    """Forward or backward difference quotient in h or tau."""
    direction = Direction(direction)
    if direction == Direction.PLUS_H:
        return (shift(p, 0, 1) - p) * H_INV
    if direction == Direction.MINUS_H:
        return (p - shift(p, 0, -1)) * H_INV
    if direction == Direction.PLUS_TAU:
        return (shift(p, 1, 0) - p) * TAU_INV
    return (p - shift(p, -1, 0)) * TAU_INV


def euler_op(p: DiffPoly) -> DiffPoly:
    """Sum over U[k,l] in p of the partial derivative shifted back by (k, l)."""
    total: Dict[Monomial, Fraction] = {}
    for v in sorted(p.grid_vars()):
        term = shift(p.diff(v), -v.k, -v.l, window=2 * DEFAULT_WINDOW)
        for m, c in term.terms.items():
            total[m] = total.get(m, 0) + c
    return DiffPoly._raw(total)


def is_divergence(p: DiffPoly) -> bool:
    return euler_op(p).is_zero()


def total_divergence(density: DiffPoly, flux: DiffPoly) -> DiffPoly:
    """D_-tau(density) + D_-h(flux)."""
    return diff_op(density, Direction.MINUS_TAU) + diff_op(flux, Direction.MINUS_H)
