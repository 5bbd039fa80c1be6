"""Named ansatz spaces for multiplier search and scheme synthesis."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Dict, List, Tuple

from src.errors import AnsatzError
from src.stencil.conservation import AnsatzSpec
from src.stencil.diffpoly import H_INV, TAU_INV, T, X, DiffPoly, U, steps
from src.stencil.operators import Direction, diff_op

# (k, l) offsets in the order the coefficients z1, z2, ... are reported
CROSS5: Tuple[Tuple[int, int], ...] = ((0, 0), (0, -1), (0, 1), (-1, 0), (1, 0))
NINE: Tuple[Tuple[int, int], ...] = (
    (0, 0), (0, 1), (0, -1), (1, 0), (1, 1), (1, -1), (-1, 0), (-1, 1), (-1, -1),
)


def _points(offsets) -> List[DiffPoly]:
    return [U(k, l) for k, l in offsets]


def _labels(prefix: str, n: int) -> Tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def cross5_linear() -> AnsatzSpec:
    basis = tuple(_points(CROSS5))
    return AnsatzSpec("cross5_linear", basis, _labels("z", len(basis)))


def nine_linear() -> AnsatzSpec:
    basis = tuple(_points(NINE))
    return AnsatzSpec("nine_linear", basis, _labels("z", len(basis)))


def affine_tx() -> AnsatzSpec:
    return AnsatzSpec("affine_tx", (DiffPoly.constant(1), T, X), ("1", "t", "x"))


def cross5_coords() -> AnsatzSpec:
    """Cross-stencil values times {1, t, x} times {1/h, 1/tau}."""
    basis, labels = [], []
    for (k, l), point in zip(CROSS5, _points(CROSS5)):
        for cname, coord in (("1", DiffPoly.constant(1)), ("t", T), ("x", X)):
            for sname, scale in (("/h", H_INV), ("/tau", TAU_INV)):
                basis.append(point * coord * scale)
                labels.append(f"{cname}*U[{k},{l}]{sname}")
    return AnsatzSpec("cross5_coords", tuple(basis), tuple(labels))


def cross5_second_order() -> AnsatzSpec:
    basis, labels = [], []
    for (k, l), point in zip(CROSS5, _points(CROSS5)):
        for sname, scale in (("/tau^2", steps(0, -2)), ("/h^2", steps(-2, 0))):
            basis.append(point * scale)
            labels.append(f"U[{k},{l}]{sname}")
    return AnsatzSpec("cross5_second_order", tuple(basis), tuple(labels))


def div_nine_restricted() -> AnsatzSpec:
    """Divergence-form residuals on the nine-point stencil.

    D_+tau of the six values with l in {-1, 0, 1} at levels n-1 and n (over
    tau), plus D_+h of a flux that is linear in the six values with l in
    {-1, 0} at levels n-1, n, n+1 (over h) or cubic: a quadratic in U, U[0,-1]
    times one of U[1,0], U[1,-1], U[-1,0], U[-1,-1] (over h^3).
    """
    basis, labels = [], []
    for k, l in ((0, 0), (0, 1), (0, -1), (-1, 0), (-1, 1), (-1, -1)):
        basis.append(diff_op(U(k, l) * TAU_INV, Direction.PLUS_TAU))
        labels.append(f"Dt(U[{k},{l}]/tau)")
    for k, l in ((0, 0), (1, 0), (-1, 0), (0, -1), (1, -1), (-1, -1)):
        basis.append(diff_op(U(k, l) * H_INV, Direction.PLUS_H))
        labels.append(f"Dx(U[{k},{l}]/h)")
    quadratics = (("U^2", U() ** 2), ("U*U[0,-1]", U() * U(0, -1)), ("U[0,-1]^2", U(0, -1) ** 2))
    for qname, q in quadratics:
        for k, l in ((1, 0), (1, -1), (-1, 0), (-1, -1)):
            basis.append(diff_op(q * U(k, l) * steps(-3, 0), Direction.PLUS_H))
            labels.append(f"Dx({qname}*U[{k},{l}]/h^3)")
    return AnsatzSpec("div_nine_restricted", tuple(basis), tuple(labels))


_ANSATZ: Dict[str, Callable[[], AnsatzSpec]] = {
    "cross5_linear": cross5_linear,
    "nine_linear": nine_linear,
    "affine_tx": affine_tx,
    "cross5_coords": cross5_coords,
    "cross5_second_order": cross5_second_order,
    "div_nine_restricted": div_nine_restricted,
}


def ansatz_names() -> List[str]:
    return list(_ANSATZ)


@lru_cache(maxsize=None)
def get_ansatz(name: str) -> AnsatzSpec:
    try:
        return _ANSATZ[name]()
    except KeyError:
        raise AnsatzError(f"unknown ansatz {name!r}; known: {', '.join(_ANSATZ)}") from None
