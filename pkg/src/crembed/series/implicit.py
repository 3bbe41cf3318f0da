"""Implicit-function solving on jets by Newton iteration."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..errors import ConvergenceError, NondegeneracyError
from .core import TruncatedSeries, linear_combination, mul, substitute
from .linalg import det_exact, invert_series_matrix
from .ring import Ring


def _newton_schedule(cap: int) -> list[int]:
    out = []
    p = 0
    while p < cap:
        p = min(2 * p + 1, cap)
        out.append(p)
    return out


def solve_implicit(
    system: Sequence[TruncatedSeries],
    unknowns: Sequence[str],
    params: Ring,
    extra_iterations: int = 3,
) -> dict[str, TruncatedSeries]:
    """Solve ``F(p, x(p)) = 0`` for series ``x(p)`` vanishing at the origin.

    ``system`` are series over one ring whose variables are the parameters of
    ``params`` together with ``unknowns``.  The origin must solve the system
    and the Jacobian in the unknowns must be invertible there; otherwise
    :class:`NondegeneracyError` carries the exact Jacobian determinant.  Each
    Newton step doubles the number of correct orders.  The residual
    ``F(p, x(p))`` is checked to vanish in ``params`` before returning.
    """
    if len(system) != len(unknowns):
        raise ValueError("need as many equations as unknowns")
    if not system:
        return {}
    ring = system[0].ring
    for f in system:
        if f.ring is not ring:
            raise ValueError("equations must share one ring")
    for p in params.vars:
        ring.index(p)
    for f in system:
        if f.constant_term():
            raise NondegeneracyError("the origin does not solve the system", None)
    jac = [[f.derivative(u) for u in unknowns] for f in system]
    j0 = [[e.constant_term() for e in row] for row in jac]
    d0 = det_exact(j0)
    if not d0:
        raise NondegeneracyError(
            f"implicit system is singular at the origin (Jacobian determinant {d0})", d0
        )

    x = {u: TruncatedSeries.zero(params) for u in unknowns}
    schedule = _newton_schedule(params.cap) + [params.cap] * extra_iterations
    for prec in schedule:
        cur = params.with_cap(prec)
        xs = {u: (v.lift(cur) if v.ring is not cur else v) for u, v in x.items()}
        fx = [substitute(f, xs, ring=cur) for f in system]
        if all(v.is_zero() for v in fx):
            x = xs
            if prec == params.cap:
                break
            continue
        jring = params.with_cap(max(prec - 1, 0))
        xj = {u: v.truncate(jring) for u, v in xs.items()}
        jx = [[substitute(e, xj, ring=jring) for e in row] for row in jac]
        jinv = invert_series_matrix(jx)
        new = {}
        for a, u in enumerate(unknowns):
            delta = linear_combination(
                cur, [(1, mul(jinv[a][b].lift(cur), fx[b])) for b in range(len(unknowns))]
            )
            new[u] = xs[u] - delta
        x = new
    x = {u: (v.lift(params) if v.ring is not params else v) for u, v in x.items()}
    residual = [substitute(f, x, ring=params) for f in system]
    if not all(r.is_zero() for r in residual):
        raise ConvergenceError("Newton iteration did not reach the requested cap")
    return x


def compose_check(system: Sequence[TruncatedSeries], solution: Mapping[str, TruncatedSeries], params: Ring) -> bool:
    """True when ``solution`` annihilates ``system`` to the cap of ``params``."""
    return all(substitute(f, dict(solution), ring=params).is_zero() for f in system)
