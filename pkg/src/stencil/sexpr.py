"""Plain-text S-expression form of polynomials.

    (+ (* 1/2 (^ U[1,0] 2) (^ h -1)) (* -1 U[0,0]))

Atoms are rationals ``p/q``, grid values ``U[k,l]``, jet variables ``u[i,j]``,
``t``, ``x``, ``h``, ``tau`` and any other bare name (``eps``, ``lam``...)
as an auxiliary symbol. The parser also accepts ``(- a b ...)`` and nested
forms; ``to_sexpr`` always writes the flat sum of products shown above.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Type, Union

from src.errors import StencilError
from src.stencil.diffpoly import (
    H_VAR,
    T_VAR,
    TAU_VAR,
    X_VAR,
    DiffPoly,
    LaurentPoly,
    StencilVar,
    VarKind,
    aux_var,
)

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")
_INDEXED = re.compile(r"^([Uu])\[(-?\d+),(-?\d+)\]$")
_NUMBER = re.compile(r"^-?\d+(/\d+)?$")
_FIXED = {"t": T_VAR, "x": X_VAR, "h": H_VAR, "tau": TAU_VAR}


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_sexpr(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for m, c in p.items():
        factors = [str(v) if e == 1 else f"(^ {v} {e})" for v, e in m]
        terms.append("(* " + " ".join([_format_rational(c)] + factors) + ")")
    return "(+ " + " ".join(terms) + ")"


def _tokenize(text: str) -> List[str]:
    pos, tokens = 0, []
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise StencilError(f"cannot tokenize at position {pos}: {text[pos:pos + 20]!r}")
        tokens.append(match.group(1))
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


def _atom(token: str, cls: Type[LaurentPoly]) -> LaurentPoly:
    if _NUMBER.match(token):
        return cls.constant(Fraction(token))
    indexed = _INDEXED.match(token)
    if indexed:
        kind = VarKind.GRID if indexed.group(1) == "U" else VarKind.JET
        return cls.variable(StencilVar(kind, int(indexed.group(2)), int(indexed.group(3))))
    if token in _FIXED:
        return cls.variable(_FIXED[token])
    if re.match(r"^[A-Za-z_][A-Za-z0-9_]*$", token):
        return cls.variable(aux_var(token))
    raise StencilError(f"unrecognised atom {token!r}")


def parse_sexpr(text: str, cls: Type[LaurentPoly] = DiffPoly) -> LaurentPoly:
    tokens = _tokenize(text)
    if not tokens:
        raise StencilError("empty expression")
    pos = 0

    def parse() -> Union[LaurentPoly, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise StencilError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok == ")":
            raise StencilError("unexpected ')'")
        if tok != "(":
            return _atom(tok, cls)
        if pos >= len(tokens):
            raise StencilError("unexpected end of expression")
        op = tokens[pos]
        pos += 1
        if op == "^":
            base = parse()
            exp_tok = tokens[pos] if pos < len(tokens) else ")"
            pos += 1
            if not _NUMBER.match(exp_tok) or "/" in exp_tok:
                raise StencilError(f"exponent must be an integer, got {exp_tok!r}")
            exponent = int(exp_tok)
            _expect_close()
            if exponent < 0:
                return _negative_power(base, exponent)
            return base ** exponent
        args = []
        while pos < len(tokens) and tokens[pos] != ")":
            args.append(parse())
        _expect_close()
        if op == "+":
            result = cls.zero()
            for a in args:
                result = result + a
            return result
        if op == "*":
            result = cls.constant(1)
            for a in args:
                result = result * a
            return result
        if op == "-":
            if not args:
                raise StencilError("'-' needs at least one argument")
            if len(args) == 1:
                return -args[0]
            result = args[0]
            for a in args[1:]:
                result = result - a
            return result
        raise StencilError(f"unknown operator {op!r}")

    def _expect_close():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != ")":
            raise StencilError("missing ')'")
        pos += 1

    def _negative_power(base: LaurentPoly, exponent: int) -> LaurentPoly:
        items = base.items()
        if len(items) != 1 or items[0][1] != 1 or len(items[0][0]) != 1:
            raise StencilError("negative powers are only allowed on h and tau")
        (v, e), = items[0][0]
        return cls({((v, e * exponent),): 1})

    result = parse()
    if pos != len(tokens):
        raise StencilError(f"trailing tokens after expression: {tokens[pos:]}")
    return result
