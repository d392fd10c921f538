"""Parsers for coefficient expressions, Gaussian rationals and problem files.

Expression grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT | INT "/" INT | VAR | "(" expr ")"

Division is only allowed by a nonzero constant, so every expression is a
polynomial in the variable.  Columns in error messages are 1-based.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .arith import GaussianRational, Poly
from .errors import ParseError
from .operators import RecOperator

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


@dataclass
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    col: int


def _tokenize(s: str, source) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(s):
        if s[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(s, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(_Tok("int", m.group(1), m.start(1) + 1))
        elif m.group(2) is not None:
            out.append(_Tok("name", m.group(2), m.start(2) + 1))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", 1, m.start(3) + 1, source)
            out.append(_Tok("op", ch, m.start(3) + 1))
        pos = m.end()
    out.append(_Tok("end", "", len(s) + 1))
    return out


class _Parser:
    def __init__(self, text: str, var: str, source=None, extra_names=()):
        self.text, self.var, self.source = text, var, source
        self.names = {var, *extra_names}
        self.toks = _tokenize(text, source)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, 1, tok.col, self.source)

    def parse(self) -> Poly:
        if self.peek().kind == "end":
            self.error("empty expression")
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            self.error(f"unexpected {t.text!r}")
        return e

    def _operand(self, op: _Tok):
        # a binary operator followed by nothing is reported at the operator
        if self.peek().kind == "end":
            self.error(f"missing operand after {op.text!r}", op)

    def expr(self) -> Poly:
        left = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take()
            self._operand(op)
            right = self.term()
            left = left + right if op.text == "+" else left - right
        return left

    def term(self) -> Poly:
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take()
            self._operand(op)
            if op.text == "*":
                left = left * self.unary()
            else:
                start = self.peek()
                right = self.unary()
                if right.degree() > 0:
                    self.error(f"division by a non-constant expression", start)
                if right.is_zero():
                    self.error("division by zero", start)
                left = left * (Fraction(1) / right[0])
        return left

    def unary(self) -> Poly:
        t = self.peek()
        if t.kind == "op" and t.text in "+-":
            self.take()
            self._operand(t)
            v = self.unary()
            return -v if t.text == "-" else v
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            op = self.take()
            self._operand(op)
            t = self.peek()
            if t.kind != "int":
                self.error("exponent must be a nonnegative integer literal")
            self.take()
            base = base ** int(t.text)
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t.kind == "int":
            return Poly([Fraction(int(t.text))], self.var)
        if t.kind == "name":
            if t.text not in self.names:
                self.error(f"unknown variable {t.text!r} (expected {self.var!r})", t)
            return Poly.gen(self.var)
        if t.kind == "op" and t.text == "(":
            if self.peek().kind == "end":
                self.error("unclosed parenthesis", t)
            e = self.expr()
            close = self.peek()
            if not (close.kind == "op" and close.text == ")"):
                self.error("expected ')'", close)
            self.take()
            return e
        if t.kind == "end":
            self.error("unexpected end of input", t)
        self.error(f"unexpected {t.text!r}", t)


def parse_poly(text: str, var: str = "n", source: str | None = None) -> Poly:
    """Parse a polynomial expression in ``var`` with rational coefficients."""
    if not isinstance(text, str):
        if isinstance(text, int):
            return Poly([Fraction(text)], var)
        raise ParseError("expected a string expression", 1, 1, source)
    return _Parser(text, var, source).parse()


def parse_gaussian(text, source: str | None = None) -> GaussianRational:
    """Parse ``a/b``, ``c/d*i``, ``a/b+c/d*i`` (any polynomial in ``i``, reduced with ``i^2 = -1``)."""
    if isinstance(text, int):
        return GaussianRational(Fraction(text))
    if not isinstance(text, str):
        raise ParseError("expected a string", 1, 1, source)
    p = _Parser(text, "i", source).parse()
    re_, im_ = Fraction(0), Fraction(0)
    for k, c in enumerate(p.coeffs()):
        sign = -1 if k % 4 >= 2 else 1
        if k % 2 == 0:
            re_ += sign * c
        else:
            im_ += sign * c
    return GaussianRational(re_, im_)


def parse_number(text, source: str | None = None) -> Fraction:
    """Exact rational from ``1/3``, ``0.25``, ``1e-100`` or an integer."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", 1, 1, source) from None


@dataclass
class ProblemSpec:
    recurrence: RecOperator
    initial: list
    initial_are_bounds: bool = False
    allow_nonreversible: bool = False
    point: GaussianRational | None = None
    eps: Fraction | None = None
    order: int = 0
    name: str | None = None
    extra: dict = field(default_factory=dict)


def _json_error(e: json.JSONDecodeError, source):
    return ParseError(e.msg, e.lineno, e.colno, source)


def parse_problem(text: str, source: str | None = None) -> ProblemSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise _json_error(e, source) from None
    if not isinstance(doc, dict):
        raise ParseError("problem must be a JSON object", 1, 1, source)
    if "coefficients" not in doc or "initial" not in doc:
        raise ParseError("problem needs 'coefficients' and 'initial'", 1, 1, source)
    coeffs = doc["coefficients"]
    if not isinstance(coeffs, list) or len(coeffs) < 2:
        raise ParseError("'coefficients' must list at least two expressions", 1, 1, source)
    polys = []
    for k, c in enumerate(coeffs):
        where = f"{source or '<input>'}: coefficients[{k}]"
        polys.append(parse_poly(c, "n", where))
    R = RecOperator(polys)
    init = []
    for k, x in enumerate(doc["initial"]):
        g = parse_gaussian(x, f"{source or '<input>'}: initial[{k}]")
        init.append(g if g.im else g.re)
    point = doc.get("point")
    eps = doc.get("eps")
    known = {"coefficients", "initial", "initial_are_bounds", "allow_nonreversible",
             "point", "eps", "order", "name"}
    return ProblemSpec(
        R, init,
        bool(doc.get("initial_are_bounds", False)),
        bool(doc.get("allow_nonreversible", False)),
        parse_gaussian(point, source) if point is not None else None,
        parse_number(eps, source) if eps is not None else None,
        int(doc.get("order", 0)),
        doc.get("name"),
        {k: v for k, v in doc.items() if k not in known},
    )
