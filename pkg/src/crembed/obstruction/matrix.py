"""Assembling and evaluating the determinant operators on concrete systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..assoc_pde import PdeSystem, pde_vars, xi_names
from ..prolong import evaluator
from ..series import (
    GaussianRational,
    Ring,
    TruncatedSeries,
    constant_matrix,
    det_exact,
    det_univariate,
    meet_all,
    mul,
)
from .operator import ObstructionSpec


def caps_for(spec: ObstructionSpec, series_order: int = 0) -> tuple[int, int]:
    """Total cap and ``(z, w)`` cap needed to know the operator to order
    ``series_order`` around the expansion point."""
    jets = spec.k - 1
    return series_order + spec.max_gamma + jets, series_order + jets


def _aligned(entries: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    ring = meet_all([e.ring for e in entries])
    return [e.truncate(ring) for e in entries]


def build_row0(spec: ObstructionSpec, sys: PdeSystem) -> list[TruncatedSeries]:
    """The functions ``h~_t`` for every basis monomial, on a common ring."""
    ev = evaluator(sys)
    return _aligned([ev.monomial(mono) for mono in spec.basis])


def pq_row0_direct(sys: PdeSystem) -> list[TruncatedSeries]:
    """Hand-written ``h~`` for the ``(1, 2)`` pinned basis.

    With ``P = Phi`` and ``Q = P_z + xi P_w + P P_xi`` the columns are
    ``Q xi^j`` (j < 3), ``xi^j`` (j <= 6), ``P xi^j`` (j <= 3),
    ``P^2 xi^j`` (j <= 1).  Serves as an independent check of the generic
    prolongation machinery.
    """
    if sys.n != 1:
        raise ValueError("the pinned basis lives in one variable")
    p = sys.phi[0][0]
    xi = TruncatedSeries.variable(sys.ring, "xi1") + sys.base_xi[0]
    pz, pw, px = p.derivative("z1"), p.derivative("w"), p.derivative("xi1")
    ring = meet_all([pz.ring, pw.ring, px.ring])
    p_, xi_ = p.truncate(ring), xi.truncate(ring)
    q = pz.truncate(ring) + mul(xi_, pw.truncate(ring)) + mul(p_, px.truncate(ring))
    one = TruncatedSeries.one(ring)
    powers = [one]
    for _ in range(6):
        powers.append(mul(powers[-1], xi_))
    p2 = mul(p_, p_)
    cols = [mul(q, powers[j]) for j in range(3)]
    cols += powers[:7]
    cols += [mul(p_, powers[j]) for j in range(4)]
    cols += [mul(p2, powers[j]) for j in range(2)]
    return cols


def _xi_derivative(s: TruncatedSeries, gamma: Sequence[int]) -> TruncatedSeries:
    for name, cnt in zip(xi_names(len(gamma)), gamma):
        if cnt:
            s = s.derivative(name, cnt)
    return s


@dataclass(frozen=True)
class OperatorMatrix:
    """Rows ``d^gamma_j / dxi^gamma_j (h~_0, ..., h~_s)`` with ``gamma_0 = 0``."""

    spec: ObstructionSpec
    rows: tuple[tuple[TruncatedSeries, ...], ...]

    @property
    def ring(self) -> Ring:
        return self.rows[0][0].ring

    def at_point(self) -> list[list[GaussianRational]]:
        return constant_matrix(self.rows)


def build_matrix(spec: ObstructionSpec, sys: PdeSystem, row0: Sequence[TruncatedSeries] | None = None) -> OperatorMatrix:
    row0 = list(row0) if row0 is not None else build_row0(spec, sys)
    rows = [row0]
    for g in spec.gammas:
        rows.append([_xi_derivative(e, g) for e in row0])
    flat = _aligned([e for r in rows for e in r])
    width = len(row0)
    out = tuple(tuple(flat[i * width : (i + 1) * width]) for i in range(len(rows)))
    if len(out) != width:
        raise ValueError("operator matrix is not square")
    return OperatorMatrix(spec, out)


def determinant_at_point(spec: ObstructionSpec, sys: PdeSystem) -> GaussianRational:
    """Exact value of the operator at the expansion point of ``sys``."""
    return det_exact(build_matrix(spec, sys).at_point())


# ---------------------------------------------------------------------------
# series mode


def line_directions(nvars: int, order: int) -> list[tuple[int, ...]]:
    """Directions ``(1, x_2, ..., x_V)`` with nonnegative integers summing to at
    most ``order``.  A polynomial of degree ``<= order`` that vanishes on
    every such line through the origin (to that order) is zero."""
    out = []

    def rec(prefix: list[int], left: int) -> None:
        if len(prefix) == nvars - 1:
            out.append((1, *prefix))
            return
        for x in range(left + 1):
            prefix.append(x)
            rec(prefix, left - x)
            prefix.pop()

    rec([], order)
    return out


def restrict_to_line(s: TruncatedSeries, direction: Sequence[int], order: int) -> list[GaussianRational]:
    """Coefficients of ``t^0..t^order`` in ``s(t * direction)``."""
    out = [GaussianRational(0)] * (order + 1)
    for exps, c in s.terms():
        d = sum(exps)
        if d > order:
            continue
        w = 1
        for v, e in zip(direction, exps):
            if e:
                w *= v**e
        if w:
            out[d] = out[d] + c * w
    return out


@dataclass(frozen=True)
class SeriesVanishing:
    """Outcome of expanding the operator around one point.

    ``vanishes`` is True when every Taylor coefficient of total degree
    ``<= order`` is zero; otherwise ``first_nonzero`` is the lowest degree
    with a nonzero coefficient along some line.
    """

    order: int
    vanishes: bool
    first_nonzero: int | None
    lines: int

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "vanishes": self.vanishes,
            "first_nonzero_degree": self.first_nonzero,
            "lines": self.lines,
        }


def determinant_series(spec: ObstructionSpec, sys: PdeSystem, order: int) -> SeriesVanishing:
    """Expand the operator to total degree ``order`` in ``(z, w, xi)``.

    The matrix entries are restricted to lines through the expansion point;
    each restricted determinant is a univariate truncated series computed
    exactly.  A unisolvent set of directions makes "zero on all lines"
    equivalent to "zero as a polynomial of degree <= order".
    """
    mat = build_matrix(spec, sys)
    ring = mat.ring
    if ring.cap < order or any(c < order for _, c in ring.groups):
        raise ValueError(f"system known only to order {ring.cap}, need {order}")
    first = None
    dirs = line_directions(len(pde_vars(spec.n)), order)
    for v in dirs:
        restricted = [[restrict_to_line(e, v, order) for e in row] for row in mat.rows]
        coeffs = det_univariate(restricted, order + 1)
        for deg, c in enumerate(coeffs):
            if c:
                first = deg if first is None else min(first, deg)
                break
        if first == 0:
            break
    return SeriesVanishing(order, first is None, first, len(dirs))
