"""Certification of conservation triples and scheme symmetries."""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from src.errors import InfeasibleError
from src.schemes.library import ConservationTriple, Scheme, get_scheme
from src.stencil.conservation import AnsatzSpec, find_density_flux, find_multipliers
from src.stencil.diffpoly import (
    H,
    T,
    TAU,
    T_VAR,
    X,
    X_VAR,
    DiffPoly,
    VarKind,
    aux,
    coordinate_weight,
    grid_degree,
    monomial_from,
    step_exponents,
)
from src.stencil.linsolve import span_rank
from src.stencil.operators import is_divergence, substitute
from src.stencil.taylor import JetPoly, leading_part, step_degree, taylor_expand

logger = logging.getLogger(__name__)

EPS = aux("eps")


@dataclass
class TripleReport:
    scheme: str
    tag: str
    label: str
    identity_ok: bool
    multiplier_ok: bool
    form: str
    density: Optional[DiffPoly]
    flux: Optional[DiffPoly]
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.form in ("printed", "reconstructed")


def _check_triple(scheme_name: str, residual: DiffPoly, triple: ConservationTriple) -> TripleReport:
    product = triple.multiplier * residual
    multiplier_ok = is_divergence(product)
    identity_ok = triple.divergence() == product
    if identity_ok:
        return TripleReport(scheme_name, triple.tag, triple.label, True, multiplier_ok, "printed",
                            triple.density, triple.flux)
    if not multiplier_ok:
        return TripleReport(scheme_name, triple.tag, triple.label, False, False, "failed", None, None,
                            "multiplier times residual is not a divergence")
    try:
        density, flux = find_density_flux(product)
    except InfeasibleError as ex:
        return TripleReport(scheme_name, triple.tag, triple.label, False, True, "failed", None, None, str(ex))
    return TripleReport(scheme_name, triple.tag, triple.label, False, True, "reconstructed", density, flux,
                        "stored density/flux do not close; reconstructed from the multiplier")


def verify_conservation_identity(scheme: Scheme, jobs: int = 1) -> List[TripleReport]:
    """Check D_-tau(density) + D_-h(flux) == multiplier * F for every triple of a scheme."""
    reports = Parallel(n_jobs=jobs)(
        delayed(_check_triple)(scheme.name, scheme.residual, t) for t in scheme.triples
    )
    for r in reports:
        if r.form == "printed":
            logger.info("[VERIFY] %s %s: identity holds", r.scheme, r.tag)
        elif r.form == "reconstructed":
            logger.warning("[VERIFY] %s %s: stored form fails, reconstructed density/flux", r.scheme, r.tag)
        else:
            logger.error("[VERIFY] %s %s: not certified (%s)", r.scheme, r.tag, r.detail)
    return list(reports)


@lru_cache(maxsize=None)
def certified_triples(scheme_name: str) -> Tuple[ConservationTriple, ...]:
    """The triples of a scheme with every density/flux pair replaced by a certified one."""
    scheme = get_scheme(scheme_name)
    out = []
    for triple, report in zip(scheme.triples, verify_conservation_identity(scheme)):
        if not report.certified:
            continue
        out.append(replace(triple, density=report.density, flux=report.flux))
    return tuple(out)


@dataclass
class SymmetryCheck:
    name: str
    claimed: bool
    holds: Optional[bool]
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.holds is None or self.holds == self.claimed


def _shift_grid(residual: DiffPoly, make) -> DiffPoly:
    mapping = {v: DiffPoly.variable(v) + make(v) for v in residual.grid_vars()}
    return substitute(residual, mapping)


def scaling_weights(p: DiffPoly, scales_u: bool) -> List[int]:
    """Weights w with p = sum of parts scaling as lam^w under t, x, h, tau -> lam * (.)."""
    return sorted({coordinate_weight(m) + (grid_degree(m) if scales_u else 0) for m in p.terms})


def expected_scaling_weight(scheme: Scheme) -> int:
    # F ~ U / tau^2: lam^-1 when U scales with the mesh, lam^-2 otherwise
    return -1 if scheme.scales_u else -2


def check_symmetries(scheme: Scheme) -> List[SymmetryCheck]:
    F = scheme.residual
    claimed = set(scheme.symmetries)
    checks = []

    gauge = _shift_grid(F, lambda v: EPS)
    checks.append(SymmetryCheck("gauge", "gauge" in claimed, gauge == F, "U -> U + eps"))

    galilei = _shift_grid(F, lambda v: EPS * (T + TAU * v.k))
    checks.append(SymmetryCheck("galilei", "galilei" in claimed, galilei == F, "U -> U + eps*t"))

    stretch = _shift_grid(F, lambda v: EPS * (X + H * v.l))
    checks.append(SymmetryCheck("stretch", "stretch" in claimed, stretch == F, "U -> U + eps*x"))

    moved = substitute(F, {T_VAR: T + EPS, X_VAR: X + EPS})
    checks.append(SymmetryCheck("translation", "translation" in claimed, moved == F, "t, x -> t + eps, x + eps"))

    weights = scaling_weights(F, scheme.scales_u)
    what = "t, x, h, tau, U" if scheme.scales_u else "t, x, h, tau"
    expected = expected_scaling_weight(scheme)
    checks.append(SymmetryCheck("scaling", "scaling" in claimed, weights == [expected],
                                f"{what} -> lam*(.) gives weights {weights}, expected [{expected}]"))

    checks.append(SymmetryCheck("boost", False, None, "not checked: breaks the orthogonality of the mesh"))
    for c in checks:
        level = logging.INFO if c.ok else logging.WARNING
        logger.log(level, "[SYMMETRY] %s %s claimed=%s holds=%s", scheme.name, c.name, c.claimed, c.holds)
    return checks


@dataclass
class MultiplierRow:
    index: int
    multiplier: DiffPoly
    limit: JetPoly
    limit_degree: Optional[int]
    vanishes_on_solutions: bool


def _multiple_of(target: JetPoly, part: JetPoly) -> bool:
    return span_rank([target, part]) == 1


def limit_vanishes_on(limit: JetPoly, target: JetPoly) -> bool:
    """True when the limit is zero or, step monomial by step monomial, a multiple of target."""
    if limit.is_zero():
        return True
    groups: Dict[Tuple[int, int], Dict] = {}
    for m, c in limit.terms.items():
        eh, et = step_exponents(m)
        rest = monomial_from({v: e for v, e in m if v.kind not in (VarKind.H, VarKind.TAU)})
        groups.setdefault((eh, et), {})[rest] = c
    return all(_multiple_of(target, JetPoly(g)) for g in groups.values())


def describe_multipliers(scheme: Scheme, ansatz: AnsatzSpec) -> List[MultiplierRow]:
    rows = []
    for i, mult in enumerate(find_multipliers(scheme.residual, ansatz)):
        expansion = taylor_expand(mult)
        limit = leading_part(expansion)
        degree = min((step_degree(m) for m in limit.terms), default=None)
        rows.append(MultiplierRow(i, mult, limit, degree, limit_vanishes_on(limit, scheme.target)))
    return rows

