"""Multi-index data of the obstruction operators and their monomial bases."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from ..errors import SpecError
from ..prolong import JetMonomial, lie_expansion, multi_indices_up_to, _alpha_key

MultiIndex = tuple[int, ...]


def unit(n: int, i: int) -> MultiIndex:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def enumerate_alpha_choices(n: int, m: int) -> list[tuple[MultiIndex, ...]]:
    """Admissible row multi-indices for a target of dimension ``m``.

    The first ``n`` are the unit vectors; for ``i > n`` the ``i``-th has order
    between 1 and ``i - (n - 1)``; all are distinct.
    """
    if m < n:
        raise SpecError("need m >= n")
    head = tuple(unit(n, i) for i in range(n))
    pools = [multi_indices_up_to(n, i - (n - 1)) for i in range(n + 1, m + 2)]
    pools = [sorted(p, key=_alpha_key) for p in pools]
    out = []
    for tail in product(*pools):
        alphas = head + tuple(tail)
        if len(set(alphas)) == len(alphas):
            out.append(alphas)
    return out


def _perm_sign(seq: list) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[j] < seq[i]:
                sign = -sign
    return sign


def determinant_support(n: int, alphas: Sequence[MultiIndex]) -> list[JetMonomial]:
    """Jet monomials that occur in the expansion of
    ``det(L^{alpha^i} F)`` with generic entries ``F``.

    Each row is expanded into jet monomials times partial derivatives of
    ``F``; terms pair up into determinants of derivative columns, which vanish
    when an operator repeats and change sign under permutations.  A monomial
    belongs to the support when some resulting coefficient is nonzero.
    """
    rows = [list(lie_expansion(n, tuple(a)).items()) for a in alphas]
    acc: dict = {}
    for choice in product(*rows):
        ops = [op for (_, op), _ in choice]
        if len(set(ops)) != len(ops):
            continue
        coef = 1
        mono = JetMonomial()
        for (mn, _), c in choice:
            coef *= c
            mono = mono * mn
        sign = _perm_sign(ops)
        key = (mono, tuple(sorted(ops)))
        acc[key] = acc.get(key, 0) + sign * coef
    monos = {mono for (mono, _), c in acc.items() if c}
    return sorted(monos, key=_mono_key)


def _mono_key(m: JetMonomial):
    return (m.weighted_degree, m.plain_degree, [_alpha_key(a) for a in m.factors])


def pq_basis() -> list[JetMonomial]:
    """The 16 monomials of the ``(n, m) = (1, 2)`` operator in its pinned order:
    ``w3 * w1^j`` (j < 3), ``w1^j`` (j <= 6), ``w2 * w1^j`` (j <= 3),
    ``w2^2 * w1^j`` (j <= 1)."""
    w1, w2, w3 = (1,), (2,), (3,)
    out = [JetMonomial.of(w3, *([w1] * j)) for j in range(3)]
    out += [JetMonomial.of(*([w1] * j)) for j in range(7)]
    out += [JetMonomial.of(w2, *([w1] * j)) for j in range(4)]
    out += [JetMonomial.of(w2, w2, *([w1] * j)) for j in range(2)]
    return out


PQ_ALPHAS = ((1,), (2,), (3,))


@dataclass(frozen=True)
class ObstructionSpec:
    """Data of one determinant operator ``D(alpha | gamma)``.

    ``basis`` lists the jet monomials ``h_0..h_s`` (columns); ``gammas`` the
    ``s`` derivative multi-indices in ``xi`` for rows ``1..s``; row 0 is
    undifferentiated.
    """

    n: int
    m: int
    alphas: tuple[MultiIndex, ...]
    gammas: tuple[MultiIndex, ...]
    basis: tuple[JetMonomial, ...]
    basis_kind: str = "support"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n, m = self.n, self.m
        if n < 1 or m < n:
            raise SpecError("need 1 <= n <= m")
        if len(self.alphas) != m + 1:
            raise SpecError(f"need {m + 1} row multi-indices, got {len(self.alphas)}")
        for i, a in enumerate(self.alphas, start=1):
            if len(a) != n or any(x < 0 for x in a):
                raise SpecError(f"alpha^{i} = {a} is not a multi-index of length {n}")
            if i <= n:
                if a != unit(n, i - 1):
                    raise SpecError(f"alpha^{i} must be the unit vector e_{i}")
            elif not 1 <= sum(a) <= i - (n - 1):
                raise SpecError(f"|alpha^{i}| = {sum(a)} outside [1, {i - (n - 1)}]")
        if len(set(self.alphas)) != len(self.alphas):
            raise SpecError("row multi-indices must be distinct")
        s = len(self.basis) - 1
        if len(set(self.basis)) != len(self.basis):
            raise SpecError("basis monomials must be distinct")
        if len(self.gammas) != s:
            raise SpecError(f"need {s} derivative multi-indices, got {len(self.gammas)}")
        for j, g in enumerate(self.gammas, start=1):
            if len(g) != n or any(x < 0 for x in g):
                raise SpecError(f"gamma^{j} = {g} is not a multi-index of length {n}")
            if not 1 <= sum(g) <= j:
                raise SpecError(f"|gamma^{j}| = {sum(g)} outside [1, {j}]")
        if len(set(self.gammas)) != len(self.gammas):
            raise SpecError("derivative multi-indices must be pairwise distinct")
        for mono in self.basis:
            if mono.max_order() > self.k + 1:
                raise SpecError(f"monomial {mono} uses jets above order {self.k + 1}")

    @property
    def k(self) -> int:
        return self.m - self.n + 1

    @property
    def d(self) -> int:
        return sum(sum(a) for a in self.alphas)

    @property
    def s(self) -> int:
        return len(self.basis) - 1

    @property
    def max_gamma(self) -> int:
        return max((sum(g) for g in self.gammas), default=0)

    @property
    def operator_order(self) -> int:
        """Highest derivative order of ``Phi`` entering the operator."""
        return self.max_gamma + self.k - 1

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "alphas": [list(a) for a in self.alphas],
            "gammas": [list(g) for g in self.gammas],
            "basis": [m.label() for m in self.basis],
            "basis_kind": self.basis_kind,
            "s": self.s,
            "k": self.k,
            "d": self.d,
        }


def default_basis(n: int, alphas: Sequence[MultiIndex]) -> tuple[str, list[JetMonomial]]:
    alphas = tuple(tuple(a) for a in alphas)
    if n == 1 and alphas == PQ_ALPHAS:
        return "pq", pq_basis()
    return "support", determinant_support(n, alphas)


def wronskian_gammas(s: int) -> tuple[MultiIndex, ...]:
    return tuple((j,) for j in range(1, s + 1))
