"""Jet monomials and the prolongation of a second-order system.

Along a solution of ``w_{z_i z_j} = Phi_ij``, every jet ``w_z^beta`` with
``|beta| >= 2`` is a universal polynomial ``Q_beta`` in ``xi = w_z`` and
partial derivatives of ``Phi``.  ``Q`` is built by applying total derivatives
``D_k = d/dz_k + xi_k d/dw + sum_l Phi_lk d/dxi_l`` in nondecreasing index
order.  For a formal, non-integrable system this order is a convention;
for systems coming from a germ any order gives the same answer.

Symbols of the universal polynomials are ``("xi", l)`` and
``("phi", i, j, beta)`` where ``beta`` counts derivatives in
``(z_1..z_n, w, xi_1..xi_n)``; all indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .assoc_pde import PdeSystem, pde_vars
from .series import GaussianRational, TruncatedSeries, meet_all, mul, linear_combination

Symbol = tuple
Mono = tuple  # sorted tuple of (symbol, exponent)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items()))


class JetPoly:
    """Sparse polynomial with integer coefficients in jet symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def symbol(cls, s: Symbol) -> "JetPoly":
        return cls({((s, 1),): 1})

    @classmethod
    def const(cls, c: int) -> "JetPoly":
        return cls({(): c})

    def __add__(self, other: "JetPoly") -> "JetPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return JetPoly(out)

    def __mul__(self, other: "JetPoly") -> "JetPoly":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return JetPoly(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, JetPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def symbols(self) -> set:
        return {s for m in self.terms for s, _ in m}

    def derivation(self, image) -> "JetPoly":
        """Apply the derivation sending each symbol ``s`` to ``image(s)``."""
        out = JetPoly()
        for m, c in self.terms.items():
            for idx, (s, e) in enumerate(m):
                rest = list(m)
                if e == 1:
                    rest.pop(idx)
                else:
                    rest[idx] = (s, e - 1)
                out = out + JetPoly({tuple(rest): c * e}) * image(s)
        return out

    def __repr__(self) -> str:
        return f"JetPoly({self.terms})"


def phi_symbol(i: int, j: int, beta: Sequence[int]) -> Symbol:
    i, j = min(i, j), max(i, j)
    return ("phi", i, j, tuple(beta))


def total_derivative_symbolic(n: int, k: int, p: JetPoly) -> JetPoly:
    """``D_k`` on a universal polynomial (1-based ``k``)."""

    def image(s: Symbol) -> JetPoly:
        if s[0] == "xi":
            return JetPoly.symbol(phi_symbol(s[1], k, (0,) * (2 * n + 1)))
        _, i, j, beta = s
        out = JetPoly()

        def bump(pos: int) -> JetPoly:
            b = list(beta)
            b[pos] += 1
            return JetPoly.symbol(phi_symbol(i, j, b))

        out = out + bump(k - 1)
        out = out + JetPoly.symbol(("xi", k)) * bump(n)
        for l in range(1, n + 1):
            out = out + JetPoly.symbol(phi_symbol(l, k, (0,) * (2 * n + 1))) * bump(n + l)
        return out

    return p.derivation(image)


def index_list(alpha: Sequence[int]) -> list[int]:
    """``(2, 1) -> [1, 1, 2]``: the nondecreasing list of 1-based indices."""
    out = []
    for k, a in enumerate(alpha, start=1):
        out.extend([k] * a)
    return out


@lru_cache(maxsize=None)
def prolongation_poly(alpha: tuple[int, ...]) -> JetPoly:
    """Universal polynomial ``Q_alpha`` for ``|alpha| >= 2``."""
    n = len(alpha)
    idx = index_list(alpha)
    if len(idx) < 2:
        raise ValueError("Q is defined for jets of order at least two")
    if len(idx) == 2:
        return JetPoly.symbol(phi_symbol(idx[0], idx[1], (0,) * (2 * n + 1)))
    prev = [0] * n
    for k in idx[:-1]:
        prev[k - 1] += 1
    return total_derivative_symbolic(n, idx[-1], prolongation_poly(tuple(prev)))


def multi_indices(n: int, order: int) -> list[tuple[int, ...]]:
    """Multi-indices of the given order, in lexicographically descending order."""
    out = []
    for combo in combinations_with_replacement(range(n), order):
        a = [0] * n
        for c in combo:
            a[c] += 1
        out.append(tuple(a))
    return sorted(set(out), reverse=True)


def multi_indices_up_to(n: int, top: int, low: int = 1) -> list[tuple[int, ...]]:
    out = []
    for d in range(low, top + 1):
        out.extend(multi_indices(n, d))
    return out


@dataclass(frozen=True)
class ProlongationTable:
    n: int
    k: int
    entries: dict

    def __getitem__(self, alpha: tuple[int, ...]) -> JetPoly:
        return self.entries[tuple(alpha)]


def build_prolongation(n: int, k: int) -> ProlongationTable:
    """``Q_alpha`` for all ``2 <= |alpha| <= k + 1``."""
    entries = {a: prolongation_poly(a) for a in multi_indices_up_to(n, k + 1, 2)}
    return ProlongationTable(n, k, entries)


# ---------------------------------------------------------------------------
# jet monomials


@dataclass(frozen=True, order=True)
class JetMonomial:
    """Product of jet variables ``w_z^alpha`` (``|alpha| >= 1``), stored as a
    sorted tuple of multi-indices with repetition."""

    factors: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def of(cls, *alphas: Sequence[int]) -> "JetMonomial":
        return cls(tuple(sorted((tuple(a) for a in alphas), key=_alpha_key)))

    @property
    def plain_degree(self) -> int:
        return len(self.factors)

    @property
    def weighted_degree(self) -> int:
        return sum(sum(a) for a in self.factors)

    def max_order(self) -> int:
        return max((sum(a) for a in self.factors), default=0)

    def __mul__(self, other: "JetMonomial") -> "JetMonomial":
        return JetMonomial.of(*(self.factors + other.factors))

    def label(self) -> str:
        if not self.factors:
            return "1"
        parts = {}
        for a in self.factors:
            parts[a] = parts.get(a, 0) + 1
        out = []
        for a in sorted(parts, key=_alpha_key):
            name = "w_" + "".join(str(k) * c for k, c in enumerate(a, start=1))
            out.append(name if parts[a] == 1 else f"{name}^{parts[a]}")
        return "*".join(out)

    def __str__(self) -> str:
        return self.label()


def _alpha_key(a: tuple[int, ...]):
    return (sum(a), tuple(-x for x in a))


def enumerate_monomials(n: int, k: int, weighted_cap: int, degree_cap: int) -> list[JetMonomial]:
    """Jet monomials in ``w_z^alpha`` (``1 <= |alpha| <= k + 1``) with weighted
    degree at most ``weighted_cap`` and plain degree at most ``degree_cap``.

    Order: weighted degree, then plain degree, then the factor tuples; the
    constant monomial comes first.
    """
    alphas = sorted(multi_indices_up_to(n, k + 1), key=_alpha_key)
    out = []

    def rec(start: int, cur: list, weight: int) -> None:
        out.append(JetMonomial(tuple(cur)))
        if len(cur) == degree_cap:
            return
        for t in range(start, len(alphas)):
            w = sum(alphas[t])
            if weight + w <= weighted_cap:
                cur.append(alphas[t])
                rec(t, cur, weight + w)
                cur.pop()

    rec(0, [], 0)
    out.sort(key=lambda m: (m.weighted_degree, m.plain_degree, [_alpha_key(a) for a in m.factors]))
    return out


# ---------------------------------------------------------------------------
# evaluation on concrete systems


class _Evaluator:
    """Evaluates universal polynomials on a concrete :class:`PdeSystem`."""

    def __init__(self, sys: PdeSystem):
        self.sys = sys
        self.names = pde_vars(sys.n)
        self._cache: dict = {}

    def symbol(self, s: Symbol) -> TruncatedSeries:
        got = self._cache.get(s)
        if got is not None:
            return got
        sys = self.sys
        if s[0] == "xi":
            l = s[1]
            val = TruncatedSeries.variable(sys.ring, f"xi{l}") + sys.base_xi[l - 1]
        else:
            _, i, j, beta = s
            val = sys.phi[i - 1][j - 1]
            for name, cnt in zip(self.names, beta):
                if cnt:
                    val = val.derivative(name, cnt)
        self._cache[s] = val
        return val

    def poly(self, p: JetPoly) -> TruncatedSeries:
        syms = sorted(p.symbols(), key=repr)
        vals = {s: self.symbol(s) for s in syms}
        ring = meet_all([v.ring for v in vals.values()] or [self.sys.ring])
        vals = {s: v.truncate(ring) for s, v in vals.items()}
        pairs = []
        for m, c in p.terms.items():
            t = TruncatedSeries.one(ring)
            for s, e in m:
                for _ in range(e):
                    t = mul(t, vals[s])
            pairs.append((c, t))
        return linear_combination(ring, pairs)

    def jet(self, alpha: tuple[int, ...]) -> TruncatedSeries:
        """Value of ``w_z^alpha`` along solutions through the expansion point."""
        key = ("jet", alpha)
        got = self._cache.get(key)
        if got is not None:
            return got
        if sum(alpha) == 1:
            l = alpha.index(1) + 1
            val = self.symbol(("xi", l))
        else:
            val = self.poly(prolongation_poly(tuple(alpha)))
        self._cache[key] = val
        return val

    def monomial(self, mono: JetMonomial) -> TruncatedSeries:
        if not mono.factors:
            return TruncatedSeries.one(self.sys.ring)
        vals = [self.jet(a) for a in mono.factors]
        ring = meet_all([v.ring for v in vals])
        out = TruncatedSeries.one(ring)
        for v in vals:
            out = mul(out, v.truncate(ring))
        return out


def substitute_prolongation(mono: JetMonomial, sys: PdeSystem, evaluator: _Evaluator | None = None) -> TruncatedSeries:
    """``h~``: the monomial with every jet of order >= 2 replaced by ``Q``."""
    ev = evaluator or _Evaluator(sys)
    return ev.monomial(mono)


def evaluator(sys: PdeSystem) -> _Evaluator:
    return _Evaluator(sys)


# ---------------------------------------------------------------------------
# symbolic expansion of L^alpha h


def lie_expansion(n: int, alpha: tuple[int, ...]) -> dict:
    """Expand ``L^alpha h`` with ``L_j = d/dz_j + w_j d/dw`` acting on a
    function ``h(z, w)`` composed with a graph ``w(z)``.

    Returns ``{(JetMonomial, (beta, r)): coefficient}`` where ``(beta, r)``
    stands for ``d^beta/dz^beta d^r/dw^r h``.
    """
    state = {(JetMonomial(), ((0,) * n, 0)): 1}
    for j in index_list(alpha):
        e = [0] * n
        e[j - 1] = 1
        e = tuple(e)
        new: dict = {}

        def add(key, c):
            new[key] = new.get(key, 0) + c

        for (mono, (beta, r)), c in state.items():
            # derivative of the monomial factors
            for pos, a in enumerate(mono.factors):
                rest = mono.factors[:pos] + mono.factors[pos + 1 :]
                bumped = tuple(x + y for x, y in zip(a, e))
                add((JetMonomial.of(*rest, bumped), (beta, r)), c)
            # derivative of h
            b2 = tuple(x + y for x, y in zip(beta, e))
            add((mono, (b2, r)), c)
            add((JetMonomial.of(*mono.factors, e), (beta, r + 1)), c)
        state = {k: v for k, v in new.items() if v}
    return state
