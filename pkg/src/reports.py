"""Tables and summaries for the CLI subcommands."""
from __future__ import annotations

import json
import logging
import os
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from src.schemes.library import Scheme
from src.schemes.verify import MultiplierRow, SymmetryCheck, TripleReport
from src.stencil.sexpr import to_sexpr
from src.stencil.taylor import ConsistencyReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def verify_frame(reports: Iterable[TripleReport]) -> pd.DataFrame:
    rows = [{
        "scheme": r.scheme,
        "triple": r.tag,
        "label": r.label,
        "identity_ok": r.identity_ok,
        "multiplier_ok": r.multiplier_ok,
        "form": r.form,
        "certified": r.certified,
        "detail": r.detail,
    } for r in reports]
    return pd.DataFrame(rows, columns=["scheme", "triple", "label", "identity_ok", "multiplier_ok", "form",
                                       "certified", "detail"])


def symmetry_frame(scheme: Scheme, checks: Iterable[SymmetryCheck]) -> pd.DataFrame:
    return pd.DataFrame([{
        "scheme": scheme.name,
        "symmetry": c.name,
        "claimed": c.claimed,
        "holds": c.holds,
        "ok": c.ok,
        "detail": c.detail,
    } for c in checks])


def order_passes(report: ConsistencyReport, stated) -> bool:
    """Consistent, and each order unseen (beyond the exact window) or at least the stated one."""
    if not report.consistent:
        return False
    return all(o is None or o >= s for o, s in zip(report.orders(), stated))


def order_frame(rows: Sequence[tuple]) -> pd.DataFrame:
    """Rows of (scheme, ConsistencyReport)."""
    return pd.DataFrame([{
        "scheme": scheme.name,
        "consistent": rep.consistent,
        "order_t": rep.order_t,
        "order_x": rep.order_x,
        "stated_t": scheme.stated_order[0],
        "stated_x": scheme.stated_order[1],
        "exact_through": rep.exact_through,
        "passes": order_passes(rep, scheme.stated_order),
        "limit": str(rep.limit),
        "leading_residual": str(rep.leading_residual),
    } for scheme, rep in rows])


def multipliers_frame(scheme: Scheme, ansatz_name: str, rows: Iterable[MultiplierRow]) -> pd.DataFrame:
    return pd.DataFrame([{
        "scheme": scheme.name,
        "ansatz": ansatz_name,
        "index": r.index,
        "multiplier": str(r.multiplier),
        "sexpr": to_sexpr(r.multiplier),
        "limit": str(r.limit),
        "limit_degree": r.limit_degree,
        "vanishes_on_solutions": r.vanishes_on_solutions,
    } for r in rows], columns=["scheme", "ansatz", "index", "multiplier", "sexpr", "limit", "limit_degree",
                               "vanishes_on_solutions"])


def verify_summary(scheme: Scheme, reports: List[TripleReport], checks: List[SymmetryCheck],
                   consistency: Optional[ConsistencyReport]) -> dict:
    return {
        "scheme": scheme.name,
        "triples": [{
            "triple": r.tag,
            "identity_ok": r.identity_ok,
            "reconstructed": r.form == "reconstructed",
            "certified": r.certified,
            "density": to_sexpr(r.density) if r.density is not None else None,
            "flux": to_sexpr(r.flux) if r.flux is not None else None,
        } for r in reports],
        "symmetry_ok": [{"symmetry": c.name, "claimed": c.claimed, "holds": c.holds, "detail": c.detail}
                        for c in checks],
        "order": None if consistency is None else {
            "consistent": consistency.consistent,
            "order_t": consistency.order_t,
            "order_x": consistency.order_x,
            "passes": order_passes(consistency, scheme.stated_order),
        },
    }


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_frame(frame: pd.DataFrame, path: str) -> str:
    _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("[REPORT] wrote %d rows to %s", len(frame), path)
    return path


def write_json(summary, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=False, default=str)
        fh.write("\n")
    logger.info("[REPORT] wrote summary to %s", path)
    return path
