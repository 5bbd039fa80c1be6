"""Exact linear algebra over QQ on coefficient vectors of polynomials.

Each polynomial becomes one column of a sparse matrix whose rows are the
monomials that occur; sympy's DomainMatrix does the row reduction.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from src.stencil.diffpoly import LaurentPoly, Monomial

Vector = List[Fraction]


def _qq(c: Fraction):
    return QQ(c.numerator, c.denominator)


def _fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def coefficient_matrix(columns: Sequence[LaurentPoly]) -> Tuple[List[Monomial], DomainMatrix]:
    rows = sorted({m for p in columns for m in p.terms})
    index = {m: i for i, m in enumerate(rows)}
    dod: Dict[int, Dict[int, object]] = {}
    for j, p in enumerate(columns):
        for m, c in p.terms.items():
            dod.setdefault(index[m], {})[j] = _qq(c)
    return rows, DomainMatrix(dod, (len(rows), len(columns)), QQ)


def _rref(matrix: DomainMatrix) -> Tuple[Dict[int, Dict[int, Fraction]], Tuple[int, ...]]:
    if matrix.shape[0] == 0:
        return {}, ()
    reduced, pivots = matrix.rref()
    sparse = reduced.to_sparse().rep
    rows = {i: {j: _fraction(v) for j, v in row.items()} for i, row in dict(sparse).items()}
    return rows, tuple(pivots)


def _kernel(rows: Dict[int, Dict[int, Fraction]], pivots: Tuple[int, ...], ncols: int) -> List[Vector]:
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows.get(i, {}).get(free, Fraction(0))
        basis.append(v)
    return basis


def nullspace(columns: Sequence[LaurentPoly]) -> List[Vector]:
    """Basis of {c : sum_i c_i * columns[i] == 0}, one vector per free column."""
    if not columns:
        return []
    _, matrix = coefficient_matrix(columns)
    rows, pivots = _rref(matrix)
    return _kernel(rows, pivots, len(columns))


def solve_affine(columns: Sequence[LaurentPoly], target: LaurentPoly) -> Tuple[Optional[Vector], List[Vector]]:
    """Solve sum_i c_i * columns[i] == target.

    Returns the particular solution with all free coefficients at zero (or
    None when the system is infeasible) and a basis of the homogeneous part.
    """
    n = len(columns)
    _, matrix = coefficient_matrix(list(columns) + [target])
    rows, pivots = _rref(matrix)
    if n in pivots:
        return None, nullspace(columns)
    particular = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        particular[pc] = rows.get(i, {}).get(n, Fraction(0))
    homogeneous = [v[:n] for v in _kernel(rows, pivots, n + 1) if v[n] == 0]
    return particular, homogeneous


def span_rank(polys: Sequence[LaurentPoly]) -> int:
    if not polys:
        return 0
    _, matrix = coefficient_matrix(polys)
    return len(_rref(matrix)[1])


def span_contains(polys: Sequence[LaurentPoly], q: LaurentPoly) -> bool:
    if q.is_zero():
        return True
    return span_rank(list(polys) + [q]) == span_rank(polys)


def same_span(a: Sequence[LaurentPoly], b: Sequence[LaurentPoly]) -> bool:
    ra = span_rank(a)
    return ra == span_rank(b) == span_rank(list(a) + list(b))


def combine(vector: Sequence[Fraction], basis: Sequence[LaurentPoly]) -> LaurentPoly:
    out: Dict[Monomial, Fraction] = {}
    cls = type(basis[0]) if basis else LaurentPoly
    for c, p in zip(vector, basis):
        if c == 0:
            continue
        for m, pc in p.terms.items():
            out[m] = out.get(m, 0) + c * pc
    return cls._raw(out)
