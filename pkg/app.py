"""Command-line entry point: simulate, audit, verify, multipliers, order, convergence."""
import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from src.audit import audit_trajectory, convergence_study, exact_solution
from src.config import RunConfig, initial_params, load_config
from src.errors import ConfigError, StencilError
from src.reports import (
    multipliers_frame,
    order_frame,
    order_passes,
    symmetry_frame,
    verify_frame,
    verify_summary,
    write_frame,
    write_json,
)
from src.schemes.ansatz import get_ansatz
from src.schemes.library import get_scheme, scheme_names
from src.schemes.verify import check_symmetries, describe_multipliers, verify_conservation_identity
from src.solver.grid import BoundaryCondition
from src.solver.io import export_trajectory, load_trajectory
from src.solver.steppers import run
from src.stencil.taylor import consistency_report

logger = logging.getLogger("app")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2

# Flags that map one-to-one onto RunConfig keys.
CONFIG_FLAGS = {
    "scheme": str, "M": int, "h": float, "tau": float, "steps": int, "bc": str, "ic": str,
    "ic_seed": int, "ic_amplitude": float, "stride": int, "ansatz": str, "tolerance": float,
    "levels": str, "final_time": float, "out": str, "out_format": str,
}


def _parse_set(items: List[str]) -> Dict[str, str]:
    """Turn repeated --set KEY=VALUE options into a dict."""
    values = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    """Subcommands share one parent parser for config and run flags."""
    parser = argparse.ArgumentParser(description="Conservative finite-difference schemes for 1+1 wave equations")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value run configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a configuration key")
    for flag, kind in CONFIG_FLAGS.items():
        common.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=kind, default=None)
    common.add_argument("--jobs", type=int, default=None, help="joblib workers (-1 for all cores)")
    common.add_argument("--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate a scheme and export the trajectory")

    audit = sub.add_parser("audit", parents=[common], help="numeric conservation and symmetry audit")
    audit.add_argument("--input", help="audit a stored trajectory instead of simulating")
    audit.add_argument("--out-dir", default="reports")

    verify = sub.add_parser("verify", parents=[common], help="symbolic identities, symmetries and order")
    verify.add_argument("--all", action="store_true", help="verify every scheme in the library")
    verify.add_argument("--json", help="write the machine-readable report here")

    sub.add_parser("multipliers", parents=[common], help="multipliers of a scheme over an ansatz")

    order = sub.add_parser("order", parents=[common], help="consistency orders by Taylor expansion")
    order.add_argument("--all", action="store_true")

    conv = sub.add_parser("convergence", parents=[common], help="observed orders under refinement")
    conv.add_argument("--reference", choices=["auto", "exact", "self"], default="auto")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file, then --set values, then explicit flags."""
    overrides: Dict[str, object] = _parse_set(args.set)
    for key in CONFIG_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    return load_config(args.config, overrides)


def _schemes(cfg: RunConfig, every: bool):
    """Every registered scheme with --all, else the configured one."""
    return [get_scheme(n) for n in scheme_names()] if every else [get_scheme(cfg.scheme)]


def cmd_simulate(cfg: RunConfig, args) -> int:
    """Integrate the configured scheme and export the trajectory."""
    traj = run(cfg)
    path = cfg.out or f"{cfg.scheme}_M{cfg.M}.{cfg.out_format}"
    export_trajectory(traj, path, cfg.out_format)
    print(f"{cfg.scheme}: {cfg.steps} steps on M={cfg.M}, {len(traj)} levels written to {path}")
    return EXIT_OK


def cmd_audit(cfg: RunConfig, args) -> int:
    """Audit a simulated or stored trajectory and write the drift CSV and JSON summary."""
    if args.input:
        bc = BoundaryCondition(cfg.bc, cfg.left, cfg.right)
        traj = load_trajectory(args.input, cfg.scheme, bc, cfg.x0, cfg.stride)
    else:
        if cfg.stride != 1:
            raise ConfigError("audit needs every level; set stride=1")
        traj = run(cfg)
    window = None
    if cfg.window_start is not None and cfg.window_length is not None:
        window = (cfg.window_start, cfg.window_length)
    report = audit_trajectory(traj, cfg.tolerance, window, cfg.jobs)
    stem = os.path.join(args.out_dir, f"{cfg.scheme}_audit")
    write_frame(report.drift_frame(), stem + "_drift.csv")
    write_json(report.summary(), stem + ".json")
    for r in report.drift:
        flag = "ok" if r.conserved else "DRIFT"
        note = " (flux-corrected)" if r.flux_corrected else ""
        print(f"{r.tag:<36} rel drift {r.max_rel_drift:.3e}  {flag}{note}")
    for b in report.balances:
        print(f"{b.tag:<36} flux balance {b.max_relative:.3e} on {list(b.window)}")
    for s in report.symmetry:
        print(f"{s.kind + '(' + format(s.parameter, 'g') + ')':<36} residual {s.relative:.3e}")
    print(f"scheme residual {report.scheme_residual:.3e}; {'passed' if report.passed else 'FAILED'}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_verify(cfg: RunConfig, args) -> int:
    """Check conservation identities, symmetry claims and consistency order symbolically."""
    ok = True
    summaries = []
    for scheme in _schemes(cfg, args.all):
        reports = verify_conservation_identity(scheme, cfg.jobs)
        checks = check_symmetries(scheme)
        consistency = consistency_report(scheme.residual, scheme.target)
        certified = sum(r.certified for r in reports)
        print(f"== {scheme.name}: {certified}/{len(reports)} triples certified")
        print(verify_frame(reports).drop(columns=["detail"]).to_string(index=False))
        print(symmetry_frame(scheme, checks).to_string(index=False))
        print(f"orders (t, x) = {consistency.orders()}, consistent = {consistency.consistent}")
        ok &= certified == len(reports)
        ok &= all(c.ok for c in checks)
        ok &= order_passes(consistency, scheme.stated_order)
        summaries.append(verify_summary(scheme, reports, checks, consistency))
    if args.json:
        write_json(summaries if len(summaries) > 1 else summaries[0], args.json)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_multipliers(cfg: RunConfig, args) -> int:
    """Print the multiplier basis of the scheme over the configured ansatz."""
    scheme = get_scheme(cfg.scheme)
    rows = describe_multipliers(scheme, get_ansatz(cfg.ansatz))
    frame = multipliers_frame(scheme, cfg.ansatz, rows)
    print(f"{scheme.name} over {cfg.ansatz}: {len(rows)} independent multiplier(s)")
    for r in rows:
        zero = "  (limit vanishes on solutions)" if r.vanishes_on_solutions else ""
        print(f"  [{r.index}] {r.multiplier}    ->  {r.limit}{zero}")
    if cfg.out:
        write_frame(frame, cfg.out)
    return EXIT_OK


def cmd_order(cfg: RunConfig, args) -> int:
    """Tabulate consistency orders from the Taylor expansion."""
    rows = [(s, consistency_report(s.residual, s.target)) for s in _schemes(cfg, args.all)]
    frame = order_frame(rows)
    print(frame.drop(columns=["limit", "leading_residual"]).to_string(index=False))
    if cfg.out:
        write_frame(frame, cfg.out)
    return EXIT_OK if bool(frame["passes"].all()) else EXIT_CHECK_FAILED


def cmd_convergence(cfg: RunConfig, args) -> int:
    """Observed convergence orders under grid refinement."""
    scheme = get_scheme(cfg.scheme)
    params = initial_params(cfg)
    reference = args.reference
    if reference == "auto":
        reference = "exact" if exact_solution(scheme, cfg.ic, params) is not None else "self"
    cfl = cfg.time_step / cfg.spacing
    study = convergence_study(scheme, cfg.levels, cfg.final_time, reference, cfg.ic, params, cfl, cfg.jobs)
    print(study.table.to_string(index=False))
    if cfg.out:
        write_frame(study.table, cfg.out)
    if not study.monotone:
        print("errors are not monotonically decreasing")
    return EXIT_OK if study.monotone else EXIT_CHECK_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "audit": cmd_audit,
    "verify": cmd_verify,
    "multipliers": cmd_multipliers,
    "order": cmd_order,
    "convergence": cmd_convergence,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except (StencilError, OSError) as ex:
        logger.error("%s failed: %s", args.command, ex)
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
