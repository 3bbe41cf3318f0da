"""Canonical text form of series.

Terms appear in canonical order with coefficient literals such as ``-1/2``,
``3*i`` or ``(1/2-3/4*i)``; the output parses back with
:func:`crembed.dsl.parse_polynomial`.
"""

from __future__ import annotations

from .gaussian import GaussianRational


def _monomial(names, exps) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _term(c: GaussianRational, mono: str) -> tuple[str, str]:
    """Return ``(sign, body)`` for one term."""
    sign = "+"
    if not c.im and c.re < 0:
        sign, c = "-", -c
    elif not c.re and c.im < 0:
        sign, c = "-", -c
    lit = str(c)
    if c.re and c.im:
        lit = f"({lit})"
    if not mono:
        return sign, lit
    if c == 1:
        return sign, mono
    return sign, f"{lit}*{mono}"


def to_text(s) -> str:
    names = s.ring.vars
    pieces = []
    for exps, c in s.terms():
        sign, body = _term(c, _monomial(names, exps))
        if not pieces:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f"{sign} {body}")
    return " ".join(pieces) if pieces else "0"
