"""Named difference schemes and their conservation-law triples."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Tuple

from src.errors import UnknownSchemeError
from src.stencil.diffpoly import H_INV, T, X, DiffPoly, U, VarKind
from src.stencil.operators import Direction, diff_op, shift, total_divergence
from src.stencil.taylor import JT, JX, JetPoly, continuum_residual, jet

logger = logging.getLogger(__name__)


class StepperKind(str, Enum):
    EXPLICIT_CROSS = "explicit_cross"
    EXPLICIT_NINE = "explicit_nine"
    IMPLICIT_TRIDIAGONAL = "implicit_tridiagonal"

    @property
    def explicit(self) -> bool:
        return self is not StepperKind.IMPLICIT_TRIDIAGONAL


@dataclass(frozen=True)
class ConservationTriple:
    """Multiplier, density and flux with D_-tau(density) + D_-h(flux) = multiplier * F."""
    tag: str
    label: str
    multiplier: DiffPoly
    density: DiffPoly
    flux: DiffPoly
    continuum_multiplier: JetPoly

    @property
    def x_dependent(self) -> bool:
        return any(p.depends_on(VarKind.X) for p in (self.density, self.flux))

    def divergence(self) -> DiffPoly:
        return total_divergence(self.density, self.flux)


@dataclass(frozen=True)
class Scheme:
    name: str
    description: str
    residual: DiffPoly
    stepper: StepperKind
    equation: str
    triples: Tuple[ConservationTriple, ...]
    symmetries: Tuple[str, ...]
    scales_u: bool
    stated_order: Tuple[int, int] = (2, 2)
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def target(self) -> JetPoly:
        return continuum_residual(self.equation)

    def triple(self, tag: str) -> ConservationTriple:
        for t in self.triples:
            if t.tag == tag:
                return t
        raise KeyError(f"{self.name} has no triple {tag!r}")


# Building blocks around the node (n, m).
u = U()


def up(p: DiffPoly) -> DiffPoly:
    return shift(p, 1, 0)


def down(p: DiffPoly) -> DiffPoly:
    return shift(p, -1, 0)


def right(p: DiffPoly) -> DiffPoly:
    return shift(p, 0, 1)


def left(p: DiffPoly) -> DiffPoly:
    return shift(p, 0, -1)


ux = diff_op(u, Direction.PLUS_H)
uxb = diff_op(u, Direction.MINUS_H)
ut = diff_op(u, Direction.PLUS_TAU)
utc = diff_op(u, Direction.MINUS_TAU)
utt = diff_op(ut, Direction.MINUS_TAU)
uxx = diff_op(ux, Direction.MINUS_H)
half = DiffPoly.constant(1) / 2

ONE = JetPoly.constant(1)
U_X, U_T = jet(0, 1), jet(1, 0)


def _linear_cross() -> Scheme:
    residual = utt - uxx
    m2 = (ux + uxb) * half
    m3 = (ut + utc) * half
    t_hat = up(T)
    x_plus = right(X)
    triples = (
        ConservationTriple("linear_cross.momentum", "momentum", DiffPoly.constant(1),
                           ut, -ux, ONE),
        ConservationTriple("linear_cross.pseudomomentum", "pseudomomentum", m2,
                           ut * up(m2), -(ut * right(ut) + ux ** 2) * half, U_X),
        ConservationTriple("linear_cross.energy", "energy", m3,
                           (ux * up(ux) + ut ** 2) * half,
                           -ux * (right(ut) + right(utc)) * half, U_T),
        ConservationTriple("linear_cross.center_of_mass", "center of mass", T,
                           t_hat * ut - up(u), -T * ux, JT),
        ConservationTriple("linear_cross.angular_momentum", "angular momentum", X,
                           X * ut, -(x_plus * ux - right(u)), JX),
        ConservationTriple(
            "linear_cross.boost", "boost", T * m2 + X * m3,
            (T + t_hat) * half * m2 * ut + X * half * ut ** 2
            + (X * 3 - x_plus) / 4 * up(uxb) * uxb,
            -((X + x_plus) * half * ux * (ut + utc) * half
              + (T * 3 - t_hat) / 4 * right(utc) * utc
              + T * half * ux ** 2),
            JT * U_X + JX * U_T,
        ),
    )
    return Scheme(
        name="LinearCross",
        description="five-point cross scheme for u_tt = u_xx",
        residual=residual,
        stepper=StepperKind.EXPLICIT_CROSS,
        equation="linear",
        triples=triples,
        symmetries=("gauge", "galilei", "stretch", "scaling", "translation"),
        scales_u=False,
        notes=("no multiplier with limit x*u_x + t*u_t exists on the cross stencil",),
    )


def _nonlinear_div2() -> Scheme:
    cubic = (ux ** 3 - uxb ** 3) * H_INV / 3
    residual = utt - uxx - cubic
    flux_core = ux + ux ** 3 / 3
    triples = (
        ConservationTriple("nonlinear_div2.momentum", "momentum", DiffPoly.constant(1),
                           ut, -flux_core, ONE),
        ConservationTriple("nonlinear_div2.center_of_mass", "center of mass", T,
                           T * ut - u, -T * flux_core, JT),
    )
    return Scheme(
        name="NonlinearDiv2",
        description="explicit cross scheme with divergence-form cubic term",
        residual=residual,
        stepper=StepperKind.EXPLICIT_CROSS,
        equation="nonlinear",
        triples=triples,
        symmetries=("gauge", "galilei", "scaling", "translation"),
        scales_u=True,
        notes=("no energy multiplier within the nine-point linear ansatz",),
    )


def _nonlinear_nine3() -> Scheme:
    bracket = DiffPoly.constant(1) + ux * (up(ux) + down(ux)) / 6
    residual = utt - uxx - diff_op(ux ** 2 * (up(ux) + down(ux)), Direction.MINUS_H) / 6
    triples = (
        ConservationTriple("nonlinear_nine3.momentum", "momentum", DiffPoly.constant(1),
                           ut, -ux * bracket, ONE),
        ConservationTriple("nonlinear_nine3.energy", "energy", (ut + utc) * half,
                           (ux * up(ux) + ut ** 2) * half + ux ** 2 * up(ux) ** 2 / 12,
                           -ux * (right(ut) + right(utc)) * half * bracket, U_T),
        ConservationTriple("nonlinear_nine3.center_of_mass", "center of mass", T,
                           T * ut - u, -T * ux * bracket, JT),
    )
    return Scheme(
        name="NonlinearNine3",
        description="implicit nine-point scheme conserving momentum, energy and center of mass",
        residual=residual,
        stepper=StepperKind.IMPLICIT_TRIDIAGONAL,
        equation="nonlinear",
        triples=triples,
        symmetries=("gauge", "galilei", "scaling", "translation"),
        scales_u=True,
        notes=("no multiplier with limit u_x within the nine-point linear ansatz",),
    )


def _nonlinear_cross1() -> Scheme:
    residual = utt - uxx - (ux ** 2 + uxb ** 2) * half * uxx
    m2 = (ux + uxb) * half
    triples = (
        ConservationTriple("nonlinear_cross1.pseudomomentum", "pseudomomentum", m2,
                           ut * up(m2), -((ut * right(ut) + ux ** 2) * half + ux ** 4 / 4), U_X),
    )
    return Scheme(
        name="NonlinearCross1",
        description="explicit cross scheme with a single pseudomomentum law",
        residual=residual,
        stepper=StepperKind.EXPLICIT_CROSS,
        equation="nonlinear",
        triples=triples,
        symmetries=("gauge", "galilei", "scaling", "translation"),
        scales_u=True,
    )


_BUILDERS: Dict[str, Callable[[], Scheme]] = {
    "LinearCross": _linear_cross,
    "NonlinearDiv2": _nonlinear_div2,
    "NonlinearNine3": _nonlinear_nine3,
    "NonlinearCross1": _nonlinear_cross1,
}


def scheme_names() -> List[str]:
    return list(_BUILDERS)


@lru_cache(maxsize=None)
def get_scheme(name: str) -> Scheme:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownSchemeError(f"unknown scheme {name!r}; known: {', '.join(_BUILDERS)}") from None
    logger.debug("[SCHEMES] building %s", name)
    return builder()

