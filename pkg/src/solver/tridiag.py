"""Tridiagonal and cyclic tridiagonal solves.

Arrays follow the usual banded layout: ``sub[i]`` multiplies ``x[i-1]`` in
row i (``sub[0]`` unused), ``sup[i]`` multiplies ``x[i+1]`` (``sup[-1]``
unused).
"""
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from src.errors import DimensionError, SingularSystemError


def _check(sub, diag, sup, rhs):
    n = len(diag)
    if n < 3:
        raise DimensionError(f"tridiagonal system needs at least 3 unknowns, got {n}")
    for name, arr in (("sub", sub), ("sup", sup), ("rhs", rhs)):
        if len(arr) != n:
            raise DimensionError(f"{name} has length {len(arr)}, expected {n}")


def solve_tridiagonal(sub, diag, sup, rhs) -> np.ndarray:
    sub, diag, sup, rhs = (np.asarray(a, dtype=float) for a in (sub, diag, sup, rhs))
    _check(sub, diag, sup, rhs)
    ab = np.zeros((3, len(diag)))
    ab[0, 1:] = sup[:-1]
    ab[1, :] = diag
    ab[2, :-1] = sub[1:]
    try:
        x = solve_banded((1, 1), ab, rhs)
    except (LinAlgError, ValueError) as ex:
        raise SingularSystemError(f"tridiagonal system is singular: {ex}") from ex
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("tridiagonal solve produced non-finite values")
    return x


def solve_tridiagonal_cyclic(sub, diag, sup, corner_terms: Optional[Tuple[float, float]], rhs) -> np.ndarray:
    """Solve a tridiagonal system, cyclic when ``corner_terms`` is given.

    ``corner_terms`` is (top_right, bottom_left): the coefficient of x[n-1]
    in row 0 and of x[0] in row n-1. The cyclic case goes through
    Sherman-Morrison on top of two banded solves.
    """
    if corner_terms is None:
        return solve_tridiagonal(sub, diag, sup, rhs)
    sub, diag, sup, rhs = (np.asarray(a, dtype=float) for a in (sub, diag, sup, rhs))
    _check(sub, diag, sup, rhs)
    top_right, bottom_left = corner_terms
    n = len(diag)
    gamma = -diag[0] if diag[0] != 0 else 1.0
    reduced = diag.copy()
    reduced[0] -= gamma
    reduced[-1] -= bottom_left * top_right / gamma
    y = solve_tridiagonal(sub, reduced, sup, rhs)
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = bottom_left
    z = solve_tridiagonal(sub, reduced, sup, u)
    denom = 1.0 + z[0] + top_right * z[-1] / gamma
    if denom == 0.0 or not np.isfinite(denom):
        raise SingularSystemError("cyclic tridiagonal system is singular")
    factor = (y[0] + top_right * y[-1] / gamma) / denom
    return y - factor * z
