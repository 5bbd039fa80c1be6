"""Numeric audits of stored trajectories.

Discrete conservation laws are checked by summing densities over the grid
(periodic) or over a window with boundary fluxes (any bc). Convergence and
symmetry checks re-run or transform trajectories and evaluate the scheme
residual.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.errors import AuditError
from src.kernels import Kernel, relative_residual
from src.schemes.library import ConservationTriple, Scheme, get_scheme
from src.schemes.verify import certified_triples
from src.solver.grid import BoundaryCondition, Grid1D, Trajectory
from src.solver.initial import make_initial_data
from src.solver.steppers import init_state, integrate
from src.stencil.diffpoly import DiffPoly
from src.stencil.operators import Direction, diff_op

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10


@lru_cache(maxsize=256)
def _kernel(poly: DiffPoly) -> Kernel:
    return Kernel(poly)


def _require_contiguous(traj: Trajectory) -> None:
    if not traj.contiguous:
        raise AuditError("audits need consecutive time levels; export with stride=1")


def admissible_levels(traj: Trajectory, *polys: DiffPoly) -> range:
    """Levels n at which every polynomial's stencil lies inside the stored levels."""
    _require_contiguous(traj)
    first, last = traj.level_range()
    lo = max(first - _kernel(p).time_offsets[0] for p in polys)
    hi = min(last - _kernel(p).time_offsets[1] for p in polys)
    return range(lo, hi + 1)


def _evaluate(traj: Trajectory, poly: DiffPoly, n: int, with_magnitude: bool = False):
    return _kernel(poly).evaluate(traj.layer, traj.grid, n, traj.time(n), with_magnitude=with_magnitude)


def _mask(traj: Trajectory, *polys: DiffPoly) -> np.ndarray:
    mask = np.ones(traj.grid.M, dtype=bool)
    for p in polys:
        lmin, lmax = _kernel(p).space_offsets
        mask &= traj.grid.valid_nodes(lmin, lmax)
    return mask


def evaluate_density(traj: Trajectory, triple: ConservationTriple, n: int) -> float:
    """Q_h(n) = sum over nodes of h * density."""
    if n not in admissible_levels(traj, triple.density):
        raise AuditError(f"level {n} is outside the admissible range for {triple.tag}")
    values = _evaluate(traj, triple.density, n)
    return float(traj.grid.h * np.sum(values[_mask(traj, triple.density)]))


@dataclass
class DriftRecord:
    scheme: str
    tag: str
    label: str
    levels: np.ndarray
    values: np.ndarray
    raw_values: np.ndarray
    flux_corrected: bool
    scale: float
    max_abs_drift: float
    max_rel_drift: float
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def conserved(self) -> bool:
        return self.max_rel_drift <= self.tolerance

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "scheme": self.scheme,
            "triple": self.tag,
            "level": self.levels,
            "Q_h": self.values,
            "drift": self.values - self.values[0],
        })


def drift_series(traj: Trajectory, triple: ConservationTriple, tolerance: float = DEFAULT_TOLERANCE) -> DriftRecord:
    """Q_h over all admissible levels of a periodic trajectory.

    Densities that depend on x are not periodic, so the node sum picks up the
    flux jump across the seam; for those the recorded quantity adds back
    tau times the summed flux differences and is marked flux-corrected.
    """
    if not traj.grid.periodic:
        raise AuditError("drift_series needs a periodic trajectory; use flux_balance for Dirichlet data")
    h, tau = traj.grid.h, traj.grid.tau
    dens = admissible_levels(traj, triple.density)
    solved = admissible_levels(traj, get_scheme(traj.scheme).residual)
    steps = [n for n in dens if n - 1 in dens and n in solved]
    levels = [steps[0] - 1] + steps if steps else []
    if len(levels) < 2:
        raise AuditError(f"trajectory too short for {triple.tag}: {len(levels)} admissible levels")
    raw = np.array([h * np.sum(_evaluate(traj, triple.density, n)) for n in levels])
    values = raw.copy()
    corrected = triple.x_dependent
    if corrected:
        seam = diff_op(triple.flux, Direction.MINUS_H)
        usable = admissible_levels(traj, seam)
        if levels[1] not in usable or levels[-1] not in usable:
            raise AuditError(f"flux correction for {triple.tag} needs levels {levels[1]}..{levels[-1]}")
        fluxes = np.array([h * np.sum(_evaluate(traj, seam, n)) for n in levels[1:]])
        values[1:] += tau * np.cumsum(fluxes)
    scale = float(h * np.sum(np.abs(_evaluate(traj, triple.density, levels[0]))))
    scale = max(scale, float(np.max(np.abs(values))))
    drift = float(np.max(np.abs(values - values[0])))
    if drift == 0.0:
        rel = 0.0
    else:
        rel = drift / scale if scale > 0 else math.inf
    record = DriftRecord(traj.scheme, triple.tag, triple.label, np.array(levels), values, raw, corrected,
                         scale, drift, rel, tolerance)
    logger.info("[AUDIT] %s %s drift=%.3e rel=%.3e%s", traj.scheme, triple.tag, drift, rel,
                " (flux-corrected)" if corrected else "")
    return record


@dataclass
class FluxBalanceRecord:
    tag: str
    window: Tuple[int, int]
    levels: np.ndarray
    residuals: np.ndarray
    scale: float

    @property
    def max_relative(self) -> float:
        peak = float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0
        if peak == 0.0:
            return 0.0
        return peak / self.scale if self.scale > 0 else math.inf


def flux_balance(traj: Trajectory, triple: ConservationTriple, window_start: int,
                 window_length: int) -> FluxBalanceRecord:
    """Residual of D_-tau(sum of h*density over a window) plus the boundary fluxes.

    The window covers nodes window_start .. window_start + window_length; the
    fluxes are taken at its right node and at the node left of it.
    """
    grid = traj.grid
    m1, m2 = window_start, window_start + window_length
    if window_length < 0:
        raise AuditError("window_length must be non-negative")
    if grid.periodic:
        if window_length + 2 > grid.M:
            raise AuditError(f"window of {window_length + 1} nodes does not fit on M={grid.M}")
        if triple.x_dependent and (m1 < 1 or m2 > grid.M - 1):
            raise AuditError(f"window [{m1}, {m2}] crosses the periodic seam, where {triple.tag} is discontinuous")
        nodes = np.arange(m1, m2 + 1) % grid.M
        left_node, right_node = (m1 - 1) % grid.M, m2 % grid.M
    else:
        mask = _mask(traj, triple.density, triple.flux)
        if m1 - 1 < 0 or m2 > grid.M - 1 or not np.all(mask[m1 - 1:m2 + 1]):
            raise AuditError(f"window [{m1}, {m2}] is too close to the Dirichlet boundary")
        nodes = np.arange(m1, m2 + 1)
        left_node, right_node = m1 - 1, m2
    dens_levels = admissible_levels(traj, triple.density)
    flux_levels = admissible_levels(traj, triple.flux)
    solved = admissible_levels(traj, get_scheme(traj.scheme).residual)
    levels = [n for n in dens_levels if n - 1 in dens_levels and n in flux_levels and n in solved]
    if not levels:
        raise AuditError(f"trajectory too short for a flux balance of {triple.tag}")
    residuals, scales = [], []
    previous = None
    for n in [levels[0] - 1] + levels:
        theta, theta_mag = _evaluate(traj, triple.density, n, with_magnitude=True)
        q = grid.h * np.sum(theta[nodes])
        q_mag = grid.h * np.sum(theta_mag[nodes])
        if previous is not None:
            phi, phi_mag = _evaluate(traj, triple.flux, n, with_magnitude=True)
            res = (q - previous[0]) / grid.tau + phi[right_node] - phi[left_node]
            residuals.append(res)
            scales.append((q_mag + previous[1]) / grid.tau + phi_mag[right_node] + phi_mag[left_node])
        previous = (q, q_mag)
    record = FluxBalanceRecord(triple.tag, (m1, m2), np.array(levels), np.array(residuals),
                               float(max(scales)) if scales else 0.0)
    logger.info("[AUDIT] %s %s flux balance on [%d, %d]: rel=%.3e", traj.scheme, triple.tag, m1, m2,
                record.max_relative)
    return record


def pointwise_identity(traj: Trajectory, triple: ConservationTriple) -> float:
    """Largest relative value of D_-tau(density) + D_-h(flux) - multiplier*F, parts evaluated apart."""
    scheme = get_scheme(traj.scheme)
    parts = [diff_op(triple.density, Direction.MINUS_TAU), diff_op(triple.flux, Direction.MINUS_H),
             -(triple.multiplier * scheme.residual)]
    worst = 0.0
    mask = _mask(traj, *parts)
    for n in admissible_levels(traj, *parts):
        total = np.zeros(traj.grid.M)
        magnitude = np.zeros(traj.grid.M)
        for p in parts:
            values, mag = _evaluate(traj, p, n, with_magnitude=True)
            total += values
            magnitude += mag
        worst = max(worst, relative_residual(total[mask], magnitude[mask]))
    return worst


def scheme_residual(traj: Trajectory, mask: Optional[np.ndarray] = None) -> float:
    """Largest relative residual of the scheme over all interior levels."""
    F = get_scheme(traj.scheme).residual
    base = _mask(traj, F)
    mask = base if mask is None else (mask & base)
    worst = 0.0
    for n in admissible_levels(traj, F):
        values, magnitude = _evaluate(traj, F, n, with_magnitude=True)
        worst = max(worst, relative_residual(values[mask], magnitude[mask]))
    return worst


# --- convergence ---------------------------------------------------------

@dataclass
class ConvergenceTable:
    scheme: str
    reference: str
    table: pd.DataFrame
    monotone: bool

    @property
    def orders(self) -> List[Optional[float]]:
        return [None if pd.isna(v) else float(v) for v in self.table["order"]]


def exact_solution(scheme: Scheme, ic: str, params: Dict[str, float], length: float = 1.0,
                   x0: float = 0.0) -> Optional[Callable[[float, np.ndarray], np.ndarray]]:
    """Closed-form solution on a periodic grid for presets that have one, else None."""
    if ic == "zero":
        return lambda t, x: np.zeros_like(x)
    if ic == "affine" and params.get("b", 0.0) == 0:
        return lambda t, x: np.full_like(x, params.get("a", 0.0))
    if ic == "sine" and scheme.equation == "linear":
        k, amp = params.get("k", 1), params.get("amplitude", 1.0)
        return lambda t, x: amp * np.sin(2 * np.pi * k * (x - x0 - t) / length)
    return None


def _final_layer(scheme_name: str, M: int, cfl: float, final_time: float, ic: str,
                 params: Dict[str, float]) -> Tuple[np.ndarray, Grid1D]:
    scheme = get_scheme(scheme_name)
    h = 1.0 / M
    tau = cfl * h
    steps = int(round(final_time / tau))
    if steps < 1 or abs(steps * tau - final_time) > 1e-9 * max(1.0, final_time):
        raise AuditError(f"final_time {final_time} is not a multiple of tau={tau} on M={M}")
    grid = Grid1D(M, h, tau, BoundaryCondition())
    u0, v0 = make_initial_data(ic, grid, **params)
    traj = integrate(scheme, grid, init_state(grid, u0, v0, scheme), steps, stride=steps)
    return traj.layer(steps), grid


def convergence_study(scheme: Scheme, levels: Sequence[int] = (32, 64, 128, 256), final_time: float = 0.5,
                      reference: str = "exact", ic: str = "sine", ic_params: Optional[Dict[str, float]] = None,
                      cfl: float = 0.5, jobs: int = 1) -> ConvergenceTable:
    """Errors and observed orders on periodic grids of [0, 1] with tau = cfl*h.

    ``reference="exact"`` compares with a closed-form solution; ``"self"``
    uses successive differences between grids restricted to the coarse nodes,
    which needs each grid to double the previous one.
    """
    params = dict(ic_params or {})
    levels = list(levels)
    if len(levels) < 2:
        raise AuditError("a convergence study needs at least two grids")
    if reference not in ("exact", "self"):
        raise AuditError(f"reference must be 'exact' or 'self', got {reference!r}")
    results = Parallel(n_jobs=jobs)(
        delayed(_final_layer)(scheme.name, M, cfl, final_time, ic, params) for M in levels
    )
    errors: List[float] = []
    if reference == "exact":
        exact = exact_solution(scheme, ic, params)
        if exact is None:
            raise AuditError(f"no closed-form solution for ic={ic!r} on {scheme.name}; use reference='self'")
        for layer, grid in results:
            errors.append(float(np.max(np.abs(layer - exact(final_time, grid.nodes)))))
    else:
        for (coarse, _), (fine, _), Mc, Mf in zip(results, results[1:], levels, levels[1:]):
            if Mf != 2 * Mc:
                raise AuditError("self-convergence needs grids that double: got M=%d then %d" % (Mc, Mf))
            errors.append(float(np.max(np.abs(coarse - fine[::2]))))
        errors.append(float("nan"))
    orders: List[float] = [float("nan")]
    for i in range(1, len(errors)):
        e0, e1 = errors[i - 1], errors[i]
        if not (e0 > 0 and e1 > 0) or math.isnan(e1):
            orders.append(float("nan"))
        else:
            orders.append(math.log(e0 / e1) / math.log(levels[i] / levels[i - 1]))
    finite = [e for e in errors if not math.isnan(e)]
    monotone = all(b < a for a, b in zip(finite, finite[1:])) or all(e == 0 for e in finite)
    table = pd.DataFrame({
        "M": levels,
        "h": [1.0 / M for M in levels],
        "tau": [cfl / M for M in levels],
        "error": errors,
        "order": orders,
    })
    if not monotone:
        logger.warning("[CONVERGENCE] %s errors are not monotonically decreasing: %s", scheme.name, errors)
    logger.info("[CONVERGENCE] %s reference=%s orders=%s", scheme.name, reference,
                [None if math.isnan(o) else round(o, 3) for o in orders])
    return ConvergenceTable(scheme.name, reference, table, monotone)


# --- symmetry ------------------------------------------------------------

@dataclass(frozen=True)
class Transform:
    kind: str
    parameter: float


@dataclass
class SymmetryResidual:
    kind: str
    parameter: float
    relative: float
    nodes_checked: int


def _transformed(traj: Trajectory, transform: Transform, scheme: Scheme) -> Tuple[Trajectory, np.ndarray]:
    grid = traj.grid
    mask = np.ones(grid.M, dtype=bool)
    eps = transform.parameter
    if transform.kind == "gauge":
        bc = BoundaryCondition(grid.bc.kind, grid.bc.left + eps, grid.bc.right + eps)
        new_grid = Grid1D(grid.M, grid.h, grid.tau, bc, grid.x0)
        return traj.with_layers(traj.layers + eps, new_grid), mask
    if transform.kind in ("galilei", "stretch") and not grid.periodic:
        raise AuditError(f"{transform.kind} moves the boundary values in time; use a periodic trajectory")
    if transform.kind == "galilei":
        return traj.with_layers(traj.layers + eps * traj.times[:, None]), mask
    if transform.kind == "stretch":
        if "stretch" not in scheme.symmetries:
            raise AuditError(f"{scheme.name} is not invariant under U -> U + eps*x")
        lmin, lmax = _kernel(scheme.residual).space_offsets
        m = np.arange(grid.M)
        mask = (m + lmin >= 0) & (m + lmax <= grid.M - 1)
        return traj.with_layers(traj.layers + eps * grid.nodes[None, :]), mask
    if transform.kind == "scale":
        lam = eps
        if lam <= 0:
            raise AuditError("scale factor must be positive")
        u_scale = lam if scheme.scales_u else 1.0
        bc = BoundaryCondition(grid.bc.kind, grid.bc.left * u_scale, grid.bc.right * u_scale)
        new_grid = Grid1D(grid.M, grid.h * lam, grid.tau * lam, bc, grid.x0 * lam)
        return traj.with_layers(traj.layers * u_scale, new_grid, traj.t0 * lam), mask
    raise AuditError(f"unknown transform {transform.kind!r}")


def symmetry_residual(traj: Trajectory, transform: Transform, scheme: Optional[Scheme] = None) -> SymmetryResidual:
    """Scheme residual on a transformed trajectory; small when the symmetry holds."""
    scheme = scheme or get_scheme(traj.scheme)
    moved, mask = _transformed(traj, transform, scheme)
    rel = scheme_residual(moved, mask)
    logger.info("[SYMMETRY] %s %s(%g): relative residual %.3e", scheme.name, transform.kind,
                transform.parameter, rel)
    return SymmetryResidual(transform.kind, transform.parameter, rel, int(mask.sum()))


# --- full report ---------------------------------------------------------

DEFAULT_TRANSFORMS = (Transform("gauge", 0.37), Transform("galilei", 0.21), Transform("stretch", 0.13),
                      Transform("scale", 2.0))


@dataclass
class AuditReport:
    scheme: str
    tolerance: float
    drift: List[DriftRecord] = field(default_factory=list)
    balances: List[FluxBalanceRecord] = field(default_factory=list)
    pointwise: Dict[str, float] = field(default_factory=dict)
    scheme_residual: float = 0.0
    symmetry: List[SymmetryResidual] = field(default_factory=list)
    convergence: Optional[ConvergenceTable] = None

    @property
    def passed(self) -> bool:
        ok = all(r.conserved for r in self.drift)
        ok &= all(b.max_relative <= self.tolerance for b in self.balances)
        ok &= all(v <= self.tolerance for v in self.pointwise.values())
        ok &= self.scheme_residual <= self.tolerance
        ok &= all(s.relative <= self.tolerance for s in self.symmetry)
        return bool(ok)

    def drift_frame(self) -> pd.DataFrame:
        frames = [r.frame() for r in self.drift]
        if not frames:
            return pd.DataFrame(columns=["scheme", "triple", "level", "Q_h", "drift"])
        return pd.concat(frames, ignore_index=True)

    def summary(self) -> dict:
        return {
            "scheme": self.scheme,
            "tolerance": self.tolerance,
            "tolerance_kind": "regression",
            "passed": self.passed,
            "scheme_residual": self.scheme_residual,
            "drift": [{
                "triple": r.tag, "label": r.label, "flux_corrected": r.flux_corrected,
                "max_abs_drift": r.max_abs_drift, "max_rel_drift": r.max_rel_drift, "conserved": r.conserved,
            } for r in self.drift],
            "flux_balance": [{
                "triple": b.tag, "window": list(b.window), "max_relative": b.max_relative,
            } for b in self.balances],
            "pointwise_identity": dict(self.pointwise),
            "symmetry": [{
                "transform": s.kind, "parameter": s.parameter, "relative": s.relative,
            } for s in self.symmetry],
        }


def audit_trajectory(traj: Trajectory, tolerance: float = DEFAULT_TOLERANCE,
                     window: Optional[Tuple[int, int]] = None, jobs: int = 1) -> AuditReport:
    """Run every trajectory check that applies to its scheme and boundary condition."""
    _require_contiguous(traj)
    scheme = get_scheme(traj.scheme)
    triples = certified_triples(scheme.name)
    report = AuditReport(scheme.name, tolerance)
    if traj.grid.periodic:
        report.drift = list(Parallel(n_jobs=jobs)(delayed(drift_series)(traj, t, tolerance) for t in triples))
    else:
        start, length = window or (2, traj.grid.M - 5)
        report.balances = [flux_balance(traj, t, start, length) for t in triples]
    report.pointwise = {t.tag: pointwise_identity(traj, t) for t in triples}
    report.scheme_residual = scheme_residual(traj)
    for transform in DEFAULT_TRANSFORMS:
        if transform.kind in ("galilei", "stretch") and not traj.grid.periodic:
            continue
        if transform.kind == "stretch" and "stretch" not in scheme.symmetries:
            continue
        report.symmetry.append(symmetry_residual(traj, transform, scheme))
    logger.info("[AUDIT] %s: %s", scheme.name, "passed" if report.passed else "FAILED")
    return report
