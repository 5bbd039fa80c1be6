"""Exact stencil algebra: polynomials, difference operators, Taylor expansion."""
from src.stencil.diffpoly import DiffPoly, H, H_INV, T, TAU, TAU_INV, U, X, aux, const, steps
from src.stencil.conservation import (
    AnsatzSpec,
    DensityFluxBounds,
    find_density_flux,
    find_multipliers,
    solve_scheme_coefficients,
)
from src.stencil.linsolve import nullspace, same_span, span_contains, span_rank
from src.stencil.operators import Direction, diff_op, euler_op, is_divergence, shift, substitute, total_divergence
from src.stencil.sexpr import parse_sexpr, to_sexpr
from src.stencil.taylor import (
    ConsistencyReport,
    JetPoly,
    admits_limit,
    consistency_report,
    continuum_limit,
    continuum_residual,
    jet,
    leading_part,
    pin_coefficients,
    taylor_expand,
)

__all__ = [
    "AnsatzSpec", "ConsistencyReport", "DensityFluxBounds", "DiffPoly", "Direction", "H", "H_INV",
    "JetPoly", "T", "TAU", "TAU_INV", "U", "X", "admits_limit", "aux", "const", "consistency_report",
    "continuum_limit", "continuum_residual", "diff_op", "euler_op", "find_density_flux",
    "find_multipliers", "is_divergence", "jet", "leading_part", "nullspace", "parse_sexpr",
    "pin_coefficients", "same_span", "shift", "solve_scheme_coefficients", "span_contains",
    "span_rank", "steps", "substitute", "taylor_expand", "to_sexpr", "total_divergence",
]
