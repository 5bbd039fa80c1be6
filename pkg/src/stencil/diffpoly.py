"""Exact polynomials in grid values, coordinates and step sizes.

A polynomial is a mapping from canonical monomials to non-zero Fraction
coefficients. A monomial is a tuple of ``(StencilVar, exponent)`` pairs sorted
by variable; only the step sizes ``h`` and ``tau`` may carry negative
exponents.
"""
from __future__ import annotations

from enum import IntEnum
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple, Union

from src.errors import StencilError, WindowOverflowError

DEFAULT_WINDOW = 4


class VarKind(IntEnum):
    GRID = 0
    T = 1
    X = 2
    H = 3
    TAU = 4
    AUX = 5
    JET = 6


class StencilVar(NamedTuple):
    """One indeterminate.

    ``GRID`` uses ``(k, l)`` as the time and space offset of U, ``JET`` uses
    them as the derivative orders in t and x, ``AUX`` is identified by name.
    """
    kind: int
    k: int = 0
    l: int = 0
    name: str = ""

    def __str__(self) -> str:
        if self.kind == VarKind.GRID:
            return f"U[{self.k},{self.l}]"
        if self.kind == VarKind.JET:
            return f"u[{self.k},{self.l}]"
        if self.kind == VarKind.AUX:
            return self.name
        return _FIXED_NAMES[self.kind]


_FIXED_NAMES = {VarKind.T: "t", VarKind.X: "x", VarKind.H: "h", VarKind.TAU: "tau"}

T_VAR = StencilVar(VarKind.T)
X_VAR = StencilVar(VarKind.X)
H_VAR = StencilVar(VarKind.H)
TAU_VAR = StencilVar(VarKind.TAU)

LAURENT_KINDS = frozenset({VarKind.H, VarKind.TAU})

Monomial = Tuple[Tuple[StencilVar, int], ...]
Scalar = Union[int, Fraction]
ONE: Monomial = ()


def grid_var(k: int, l: int, window: int = DEFAULT_WINDOW) -> StencilVar:
    if abs(k) > window or abs(l) > window:
        raise WindowOverflowError(k, l, window)
    return StencilVar(VarKind.GRID, k, l)


def aux_var(name: str) -> StencilVar:
    return StencilVar(VarKind.AUX, 0, 0, name)


def monomial_from(exponents: Dict[StencilVar, int]) -> Monomial:
    return tuple(sorted((v, e) for v, e in exponents.items() if e != 0))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for v, e in b:
        merged[v] = merged.get(v, 0) + e
    return monomial_from(merged)


def step_exponents(m: Monomial) -> Tuple[int, int]:
    """Exponents of (h, tau) in a monomial."""
    eh = et = 0
    for v, e in m:
        if v.kind == VarKind.H:
            eh = e
        elif v.kind == VarKind.TAU:
            et = e
    return eh, et


def grid_degree(m: Monomial) -> int:
    return sum(e for v, e in m if v.kind == VarKind.GRID)


def coordinate_weight(m: Monomial) -> int:
    """Total degree in t, x, h and tau; shifts preserve it."""
    return sum(e for v, e in m if v.kind in (VarKind.T, VarKind.X, VarKind.H, VarKind.TAU))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


class LaurentPoly:
    """Shared arithmetic for :class:`DiffPoly` and the jet polynomials."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, Scalar]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = _as_fraction(c)
            if c == 0:
                continue
            for v, e in m:
                if e < 0 and v.kind not in LAURENT_KINDS:
                    raise StencilError(f"negative exponent on {v} is not allowed")
            clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]):
        obj = cls.__new__(cls)
        obj._terms = {m: c for m, c in terms.items() if c != 0}
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c: Scalar):
        return cls({ONE: c})

    @classmethod
    def variable(cls, v: StencilVar, exponent: int = 1):
        return cls({((v, exponent),): 1})

    @classmethod
    def zero(cls):
        return cls._raw({})

    # --- inspection -------------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self._terms.items())

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def variables(self) -> Set[StencilVar]:
        return {v for m in self._terms for v, _ in m}

    def depends_on(self, kind: int) -> bool:
        return any(v.kind == kind for m in self._terms for v, _ in m)

    def select(self, predicate) -> "LaurentPoly":
        return type(self)._raw({m: c for m, c in self._terms.items() if predicate(m)})

    # --- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return type(self).constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return type(self)._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c0 = _as_fraction(other)
            return type(self)._raw({m: c * c0 for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = monomial_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return type(self)._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self * (1 / _as_fraction(other))
        if isinstance(other, LaurentPoly) and len(other._terms) == 1:
            (m, c), = other._terms.items()
            if all(v.kind in LAURENT_KINDS for v, _ in m):
                inv = tuple((v, -e) for v, e in m)
                return self * type(self)({inv: 1 / c})
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise StencilError("only non-negative integer powers are supported")
        result = type(self).constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def diff(self, v: StencilVar):
        """Formal partial derivative with respect to one variable."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.get(v, 0)
            if e == 0:
                continue
            exps[v] = e - 1
            key = monomial_from(exps)
            out[key] = out.get(key, 0) + c * e
        return type(self)._raw(out)

    def __str__(self) -> str:
        return format_terms(self.items())

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


class DiffPoly(LaurentPoly):
    """Polynomial in U[k,l], t, x, auxiliary symbols and Laurent in h, tau."""

    __slots__ = ()

    def grid_vars(self) -> Set[StencilVar]:
        return {v for m in self._terms for v, _ in m if v.kind == VarKind.GRID}

    def grid_extent(self) -> Optional[Tuple[int, int, int, int]]:
        """(kmin, kmax, lmin, lmax) over the grid values that occur."""
        gv = self.grid_vars()
        if not gv:
            return None
        ks = [v.k for v in gv]
        ls = [v.l for v in gv]
        return min(ks), max(ks), min(ls), max(ls)

    def time_offsets(self) -> Tuple[int, int]:
        ext = self.grid_extent()
        return (0, 0) if ext is None else (ext[0], ext[1])

    def grid_degrees(self) -> Set[int]:
        return {grid_degree(m) for m in self._terms}

    def coordinate_weights(self) -> Set[int]:
        return {coordinate_weight(m) for m in self._terms}


def U(k: int = 0, l: int = 0, window: int = DEFAULT_WINDOW) -> DiffPoly:
    return DiffPoly.variable(grid_var(k, l, window))


def const(c: Scalar) -> DiffPoly:
    return DiffPoly.constant(c)


def aux(name: str) -> DiffPoly:
    return DiffPoly.variable(aux_var(name))


T = DiffPoly.variable(T_VAR)
X = DiffPoly.variable(X_VAR)
H = DiffPoly.variable(H_VAR)
TAU = DiffPoly.variable(TAU_VAR)
H_INV = DiffPoly.variable(H_VAR, -1)
TAU_INV = DiffPoly.variable(TAU_VAR, -1)


def steps(h_exp: int = 0, tau_exp: int = 0) -> DiffPoly:
    """The monomial h^h_exp * tau^tau_exp."""
    return DiffPoly({monomial_from({H_VAR: h_exp, TAU_VAR: tau_exp}): 1})


def psum(polys: Iterable[LaurentPoly], start: Optional[LaurentPoly] = None) -> LaurentPoly:
    out: Dict[Monomial, Fraction] = {}
    cls = type(start) if start is not None else DiffPoly
    for p in polys:
        cls = type(p)
        for m, c in p._terms.items():
            out[m] = out.get(m, 0) + c
    if start is not None:
        for m, c in start._terms.items():
            out[m] = out.get(m, 0) + c
    return cls._raw(out)


def _format_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(items: List[Tuple[Monomial, Fraction]]) -> str:
    if not items:
        return "0"
    parts = []
    for i, (m, c) in enumerate(items):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        factors = [str(v) if e == 1 else f"{v}^{e}" for v, e in m]
        if not factors:
            body = _format_coef(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_coef(mag) + "*" + "*".join(factors)
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)
