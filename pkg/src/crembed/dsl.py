"""Text syntax for polynomial defining functions.

Grammar (EBNF)::

    expression = term , { ( "+" | "-" ) , term } ;
    term       = unary , { "*" , unary } ;
    unary      = { "+" | "-" } , power ;
    power      = atom , [ "^" , integer ] ;
    atom       = number | "i" | variable | "(" , expression , ")" ;
    number     = integer , [ "/" , integer ] ;
    variable   = letter , { letter | digit } ;

``-x^2`` means ``-(x^2)``.  Lines starting with ``#`` are comments; a
``# name: ...`` comment names the germ.  Parsing yields an exact polynomial
as a mapping from exponent tuples to Gaussian rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DSLSyntaxError
from .series.gaussian import GaussianRational

Poly = dict[tuple[int, ...], GaussianRational]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(_Tok("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise DSLSyntaxError(f"unexpected character {ch!r}", m.start(3), text)
            out.append(_Tok("op", ch, m.start(3)))
        pos = m.end()
    out.append(_Tok("end", "", len(text.rstrip())))
    return out


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, GaussianRational(0)) + (v if sign > 0 else -v)
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            nv = out.get(k, GaussianRational(0)) + va * vb
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


class _Parser:
    def __init__(self, text: str, variables: Sequence[str], max_power: int):
        self.text = text
        self.vars = list(variables)
        self.nv = len(self.vars)
        self.toks = _tokenize(text)
        self.i = 0
        self.max_power = max_power

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise DSLSyntaxError(msg, tok.pos, self.text)

    def const(self, c) -> Poly:
        c = GaussianRational.coerce(c) if not isinstance(c, GaussianRational) else c
        return {(0,) * self.nv: c} if c else {}

    def parse(self) -> Poly:
        if self.peek().kind == "end":
            self.fail("empty expression")
        p = self.expression()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return p

    def expression(self) -> Poly:
        p = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            sign = 1 if self.take().text == "+" else -1
            p = _padd(p, self.term(), sign)
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            p = _pmul(p, self.unary())
        if self.peek().kind == "op" and self.peek().text == "/":
            self.fail("division is only allowed inside a rational literal p/q")
        return p

    def unary(self) -> Poly:
        sign = 1
        while self.peek().kind == "op" and self.peek().text in "+-":
            if self.take().text == "-":
                sign = -sign
        p = self.power()
        if sign < 0:
            p = {k: -v for k, v in p.items()}
        return p

    def power(self) -> Poly:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "int":
                self.fail("exponent must be a non-negative integer literal")
            self.take()
            e = int(tok.text)
            if e > self.max_power:
                self.fail(f"exponent {e} exceeds the degree cap {self.max_power}", tok)
            out = self.const(1)
            for _ in range(e):
                out = _pmul(out, base)
            return out
        return base

    def atom(self) -> Poly:
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            num = int(tok.text)
            if self.peek().kind == "op" and self.peek().text == "/":
                self.take()
                d = self.peek()
                if d.kind != "int":
                    self.fail("expected a denominator")
                self.take()
                if int(d.text) == 0:
                    self.fail("zero denominator", d)
                return self.const(Fraction(num, int(d.text)))
            return self.const(num)
        if tok.kind == "name":
            self.take()
            if tok.text == "i":
                return self.const(GaussianRational(0, 1))
            if tok.text not in self.vars:
                self.fail(
                    f"unknown variable {tok.text!r} (expected one of {', '.join(self.vars)})",
                    tok,
                )
            e = [0] * self.nv
            e[self.vars.index(tok.text)] = 1
            return {tuple(e): GaussianRational(1)}
        if tok.kind == "op" and tok.text == "(":
            self.take()
            p = self.expression()
            if not (self.peek().kind == "op" and self.peek().text == ")"):
                self.fail("expected ')'")
            self.take()
            return p
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {tok.text!r}")
        raise AssertionError


def parse_polynomial(text: str, variables: Sequence[str], max_power: int = 255) -> Poly:
    """Parse an expression into ``{exponents: coefficient}``."""
    return _Parser(text, variables, max_power).parse()


@dataclass(frozen=True)
class SourceText:
    name: str | None
    body: str


def split_source(text: str) -> SourceText:
    """Strip ``#`` comments, collecting an optional ``# name:`` header."""
    name = None
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            m = re.match(r"#\s*name\s*:\s*(.+)$", stripped)
            if m and name is None:
                name = m.group(1).strip()
            continue
        body.append(line)
    return SourceText(name, " ".join(body).strip())
