"""Taylor expansion of stencil polynomials about the node (t, x).

U[k,l] is replaced by the truncated series
sum_{i+j<=N} (k tau)^i (l h)^j / (i! j!) u[i,j], where u[i,j] stands for the
mixed derivative d^i_t d^j_x u. Products are truncated at total derivative
order N, so a term is exact as long as its step degree (exponent of h plus
exponent of tau) is at most N plus the smallest step degree among the input
monomials.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence

from src.errors import InconsistentSchemeError, StencilError
from src.stencil.diffpoly import (
    H_VAR,
    T_VAR,
    TAU_VAR,
    X_VAR,
    DiffPoly,
    LaurentPoly,
    Monomial,
    StencilVar,
    VarKind,
    monomial_from,
    monomial_mul,
    step_exponents,
)
from src.stencil.linsolve import combine, nullspace, solve_affine

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 4


class JetPoly(LaurentPoly):
    """Polynomial in jet variables u[i,j], t, x and Laurent in h, tau."""

    __slots__ = ()


def jet(i: int = 0, j: int = 0) -> JetPoly:
    return JetPoly.variable(StencilVar(VarKind.JET, i, j))


JT = JetPoly.variable(T_VAR)
JX = JetPoly.variable(X_VAR)


def step_degree(m: Monomial) -> int:
    eh, et = step_exponents(m)
    return eh + et


def min_step_degree(p: LaurentPoly) -> int:
    return min((step_degree(m) for m in p.terms), default=0)


def _jet_order(m: Monomial) -> int:
    return sum(e * (v.k + v.l) for v, e in m if v.kind == VarKind.JET)


def _grid_series(k: int, l: int, order: int) -> Dict[Monomial, Fraction]:
    series: Dict[Monomial, Fraction] = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            coef = Fraction(k ** i * l ** j, factorial(i) * factorial(j))
            if coef == 0:
                continue
            m = monomial_from({StencilVar(VarKind.JET, i, j): 1, TAU_VAR: i, H_VAR: j})
            series[m] = coef
    return series


def _truncated_product(a: Dict[Monomial, Fraction], b: Dict[Monomial, Fraction], order: int,
                       orders: Dict[Monomial, int]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for ma, ca in a.items():
        oa = orders.setdefault(ma, _jet_order(ma))
        for mb, cb in b.items():
            ob = orders.setdefault(mb, _jet_order(mb))
            if oa + ob > order:
                continue
            m = monomial_mul(ma, mb)
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def taylor_expand(p: DiffPoly, order: int = DEFAULT_ORDER) -> JetPoly:
    if order < 0:
        raise StencilError("expansion order must be non-negative")
    series_cache: Dict[StencilVar, Dict[Monomial, Fraction]] = {}
    orders: Dict[Monomial, int] = {}
    out: Dict[Monomial, Fraction] = {}
    for m, c in p.terms.items():
        acc: Dict[Monomial, Fraction] = {(): Fraction(1)}
        rest = {}
        for v, e in m:
            if v.kind != VarKind.GRID:
                rest[v] = e
                continue
            if v not in series_cache:
                series_cache[v] = _grid_series(v.k, v.l, order)
            for _ in range(e):
                acc = _truncated_product(acc, series_cache[v], order, orders)
        rest_m = monomial_from(rest)
        for jm, jc in acc.items():
            key = monomial_mul(rest_m, jm)
            out[key] = out.get(key, 0) + c * jc
    return JetPoly._raw(out)


def exact_through(p: DiffPoly, order: int) -> int:
    """Highest step degree at which taylor_expand(p, order) is exact."""
    return order + min_step_degree(p)


def order_for(p_or_polys, degree: int, order: Optional[int] = None) -> int:
    """Smallest truncation order (at least ``order``) exact through ``degree``."""
    polys = p_or_polys if isinstance(p_or_polys, (list, tuple)) else [p_or_polys]
    floor = min(min_step_degree(p) for p in polys) if polys else 0
    return max(order if order is not None else DEFAULT_ORDER, degree - floor)


def leading_part(expansion: LaurentPoly) -> LaurentPoly:
    """The terms of lowest step degree."""
    if expansion.is_zero():
        return expansion
    low = min_step_degree(expansion)
    return expansion.select(lambda m: step_degree(m) == low)


def continuum_limit(p: DiffPoly, order: int = DEFAULT_ORDER) -> JetPoly:
    return leading_part(taylor_expand(p, order))


def continuum_residual(kind: str) -> JetPoly:
    """u_tt - u_xx, or u_tt - (1 + u_x^2) u_xx for the nonlinear equation."""
    linear = jet(2, 0) - jet(0, 2)
    if kind == "linear":
        return linear
    if kind == "nonlinear":
        return linear - jet(0, 1) ** 2 * jet(0, 2)
    raise StencilError(f"unknown continuum equation {kind!r}")


@dataclass
class ConsistencyReport:
    consistent: bool
    order_t: Optional[int]
    order_x: Optional[int]
    limit: JetPoly
    leading_residual: JetPoly
    exact_through: int

    def orders(self):
        return self.order_t, self.order_x


def consistency_report(residual: DiffPoly, target: JetPoly, order: Optional[int] = None,
                       trial_degree: int = 2) -> ConsistencyReport:
    """Expand a scheme residual and compare it with the continuum equation.

    Orders are None when no term carrying that step size shows up within the
    exact window, meaning the order exceeds ``exact_through``.
    """
    n = order_for(residual, trial_degree, order)
    window = exact_through(residual, n)
    expansion = taylor_expand(residual, n)
    negative = expansion.select(lambda m: step_degree(m) < 0)
    if not negative.is_zero():
        raise InconsistentSchemeError(f"negative-degree terms survive: {negative}", negative)
    limit = expansion.select(lambda m: step_degree(m) == 0)
    remainder = expansion.select(lambda m: 0 < step_degree(m) <= window)

    def first_order(which: int) -> Optional[int]:
        degrees = [step_degree(m) for m in remainder.terms if step_exponents(m)[which] > 0]
        return min(degrees) if degrees else None

    report = ConsistencyReport(
        consistent=(limit == target),
        order_t=first_order(1),
        order_x=first_order(0),
        limit=limit,
        leading_residual=leading_part(remainder),
        exact_through=window,
    )
    logger.info("[CONSISTENCY] consistent=%s order_t=%s order_x=%s exact_through=%d",
                report.consistent, report.order_t, report.order_x, window)
    return report


def _step_free(target: LaurentPoly) -> bool:
    return all(step_exponents(m) == (0, 0) for m in target.terms)


def admits_limit(multipliers: Sequence[DiffPoly], target: JetPoly, order: Optional[int] = None) -> bool:
    """Whether some non-zero combination of multipliers tends to a multiple of target.

    A combination qualifies when all its expansion terms below some step
    degree d cancel and its degree-d part is a non-zero combination of
    h^a tau^b * target.
    """
    if not multipliers:
        return False
    if target.is_zero() or not _step_free(target):
        raise StencilError("target must be a non-zero expression without h or tau")
    n = order_for(list(multipliers), 2, order)
    window = n + min(min_step_degree(p) for p in multipliers)
    expansions = [taylor_expand(p, n) for p in multipliers]
    lowest = min(min_step_degree(e) for e in expansions if not e.is_zero()) \
        if any(not e.is_zero() for e in expansions) else window + 1
    for d in range(lowest, window + 1):
        truncated = [e.select(lambda m, d=d: step_degree(m) <= d) for e in expansions]
        scalings = sorted({step_exponents(m) for e in truncated for m in e.terms if step_degree(m) == d})
        if not scalings:
            continue
        columns: List[LaurentPoly] = list(truncated)
        for eh, et in scalings:
            scale = JetPoly({monomial_from({H_VAR: eh, TAU_VAR: et}): 1})
            columns.append(-(target * scale))
        k = len(truncated)
        for vector in nullspace(columns):
            if any(c != 0 for c in vector[k:]):
                logger.info("[LIMIT] combination with limit %s found at step degree %d", target, d)
                return True
    return False


@dataclass
class PinnedScheme:
    residual: DiffPoly
    free_directions: List[DiffPoly] = field(default_factory=list)


def pin_coefficients(family: Sequence[DiffPoly], target: JetPoly, through_degree: int = 1,
                     order: Optional[int] = None) -> Optional[PinnedScheme]:
    """Pick a family member whose expansion is target plus O(degree > through_degree).

    Returns None when no member qualifies.
    """
    if not family:
        return None
    n = order_for(list(family), through_degree, order)
    columns = [taylor_expand(p, n).select(lambda m: step_degree(m) <= through_degree) for p in family]
    particular, homogeneous = solve_affine(columns, target)
    if particular is None:
        logger.info("[PIN] no family member reaches the target through degree %d", through_degree)
        return None
    residual = combine(particular, family)
    free = [combine(v, family) for v in homogeneous]
    return PinnedScheme(residual=residual, free_directions=free)
