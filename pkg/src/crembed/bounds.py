"""Closed-form size bounds for the obstruction operators.

All quantities are exact integers:

* ``p(m, n) = n + n(n+1)/2 * C(m, n)`` bounds the number of jet variables
  entering the basis monomials,
* ``(m+1)(m+2)/2`` caps their weighted degree,
* ``s <= C((m+1)(m+2)/2 + p, p)`` bounds the number of basis monomials,
* ``nu(n, m) = 2 + (m - n) + s_bound`` bounds the order of the operator,
* ``mu(n, N) = nu(n, N)``, which is also the maximum of ``nu(n, m)`` over
  ``n <= m <= N`` because ``nu`` grows with ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

# For (n, N) = (1, 2) the explicit 16 x 16 operator involves derivatives of
# Phi up to order 16, that is jets of the defining function up to order 18.
SHARP = {(1, 2): {"phi_order": 16, "mu": 18}}


def _check(m: int, n: int) -> None:
    if n < 1 or m < n:
        raise ValueError(f"need m >= n >= 1, got m={m}, n={n}")


def p_of(m: int, n: int) -> int:
    _check(m, n)
    return n + n * (n + 1) // 2 * comb(m, n)


def weighted_cap(m: int) -> int:
    return (m + 1) * (m + 2) // 2


def s_bound(m: int, n: int) -> int:
    p = p_of(m, n)
    return comb(weighted_cap(m) + p, p)


def nu_of(n: int, m: int) -> int:
    _check(m, n)
    return 2 + (m - n) + s_bound(m, n)


def mu_of(n: int, N: int) -> int:
    """``nu(n, N)``, checked against the maximum over intermediate ``m``."""
    _check(N, n)
    value = nu_of(n, N)
    top = max(nu_of(n, m) for m in range(n, N + 1))
    if top != value:
        raise ArithmeticError(f"nu(n, m) is not monotone in m for n={n}, N={N}")
    return value


def count_multiindices(l: int, n: int) -> int:
    """Number of multi-indices of length ``n`` and order ``l``."""
    if l < 0 or n < 1:
        raise ValueError("need l >= 0 and n >= 1")
    return comb(l + n - 1, n - 1)


@dataclass(frozen=True)
class BoundReport:
    n: int
    m: int
    p: int
    weighted_cap: int
    s_bound: int
    nu: int
    mu: int
    sharp: dict | None = None

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "weighted_cap": self.weighted_cap,
            "s_bound": self.s_bound,
            "nu": self.nu,
            "mu": self.mu,
        }
        if self.sharp:
            out["sharp"] = dict(self.sharp)
        return out


def bound_report(n: int, m: int) -> BoundReport:
    return BoundReport(
        n=n,
        m=m,
        p=p_of(m, n),
        weighted_cap=weighted_cap(m),
        s_bound=s_bound(m, n),
        nu=nu_of(n, m),
        mu=mu_of(n, m),
        sharp=SHARP.get((n, m)),
    )


def bound_table(n: int, N: int) -> list[BoundReport]:
    """Reports for every ``m`` in ``n..N``."""
    _check(N, n)
    return [bound_report(n, m) for m in range(n, N + 1)]
