"""Truncation data shared by series: variables, a total-degree cap and
optional caps on the degree in subsets of the variables ("groups").

Every ring describes a downward-closed set of monomials, so truncating a
product to it is a ring homomorphism.  Monomials are packed into integers
with eight bits per variable; the total-degree check done before adding two
keys rules out carries between fields.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..errors import AlignmentError, CapExhaustedError

BITS = 8
MAX_CAP = (1 << BITS) - 1
_MASK = MAX_CAP


class Ring:
    __slots__ = (
        "vars",
        "cap",
        "groups",
        "nvars",
        "_shifts",
        "_var_index",
        "_gvars",
        "_gcaps",
        "__weakref__",
    )
    _cache: dict = {}

    def __new__(
        cls,
        vars: Sequence[str],
        cap: int,
        groups: Iterable[tuple[Iterable, int]] = (),
    ) -> "Ring":
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise ValueError(f"repeated variable names in {vars}")
        if cap < 0:
            raise CapExhaustedError("truncation cap would become negative")
        if cap > MAX_CAP:
            raise ValueError(f"cap {cap} exceeds the supported maximum {MAX_CAP}")
        norm: dict[tuple[int, ...], int] = {}
        for members, gcap in groups:
            idx = []
            for v in members:
                if isinstance(v, str):
                    if v not in vars:
                        raise ValueError(f"group variable {v!r} not in {vars}")
                    idx.append(vars.index(v))
                else:
                    idx.append(int(v))
            key = tuple(sorted(set(idx)))
            if not key:
                continue
            if gcap < 0:
                raise CapExhaustedError("group cap would become negative")
            if gcap >= cap:
                continue
            norm[key] = min(gcap, norm.get(key, gcap))
        gtuple = tuple(sorted(norm.items()))
        ident = (vars, cap, gtuple)
        obj = cls._cache.get(ident)
        if obj is not None:
            return obj
        obj = object.__new__(cls)
        obj.vars = vars
        obj.cap = cap
        obj.groups = gtuple
        obj.nvars = len(vars)
        obj._shifts = tuple(BITS * (len(vars) - 1 - v) for v in range(len(vars)))
        obj._var_index = {name: i for i, name in enumerate(vars)}
        obj._gvars = tuple(g for g, _ in gtuple)
        obj._gcaps = tuple(c for _, c in gtuple)
        cls._cache[ident] = obj
        return obj

    # -- identity -----------------------------------------------------
    def __reduce__(self):
        return (Ring, (self.vars, self.cap, self.groups))

    def __repr__(self) -> str:
        gs = ", ".join(
            f"{{{','.join(self.vars[i] for i in g)}}}<={c}" for g, c in self.groups
        )
        extra = f"; {gs}" if gs else ""
        return f"Ring({','.join(self.vars)}; cap={self.cap}{extra})"

    # -- monomial helpers ---------------------------------------------
    def index(self, name: str) -> int:
        try:
            return self._var_index[name]
        except KeyError:
            raise AlignmentError(f"variable {name!r} not in {self.vars}") from None

    @property
    def gcaps(self) -> tuple[int, ...]:
        return self._gcaps

    def key(self, exps: Sequence[int]) -> int:
        k = 0
        for e, s in zip(exps, self._shifts):
            k |= e << s
        return k

    def exps(self, key: int) -> tuple[int, ...]:
        return tuple((key >> s) & _MASK for s in self._shifts)

    def unit_key(self, var: int) -> int:
        return 1 << self._shifts[var]

    def gdegs(self, exps: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(exps[i] for i in g) for g in self._gvars)

    def allows(self, exps: Sequence[int]) -> bool:
        if len(exps) != self.nvars or any(e < 0 for e in exps):
            return False
        if sum(exps) > self.cap:
            return False
        return all(d <= c for d, c in zip(self.gdegs(exps), self._gcaps))

    def monomials(self) -> list[tuple[int, ...]]:
        """All allowed exponent tuples in canonical (graded, lex-descending) order."""
        out: list[tuple[int, ...]] = []

        def rec(prefix: list[int], left: int, pos: int) -> None:
            if pos == self.nvars:
                out.append(tuple(prefix))
                return
            for e in range(left, -1, -1):
                prefix.append(e)
                rec(prefix, left - e, pos + 1)
                prefix.pop()

        for d in range(self.cap + 1):
            start = len(out)
            rec([], d, 0)
            kept = [m for m in out[start:] if sum(m) == d and self.allows(m)]
            del out[start:]
            out.extend(kept)
        return out

    # -- ring transformations ----------------------------------------
    def with_cap(self, cap: int) -> "Ring":
        return Ring(self.vars, cap, [(g, min(c, cap)) for g, c in self.groups])

    def derivative(self, var: int) -> "Ring":
        groups = [(g, c - 1 if var in g else c) for g, c in self.groups]
        return Ring(self.vars, self.cap - 1, groups)

    def max_group_degree(self, members: Iterable[int]) -> int:
        """Largest degree in ``members`` among allowed monomials (upper bound)."""
        mem = set(members)
        best = self.cap
        free = set(mem)
        for g, c in self.groups:
            gs = set(g)
            if mem <= gs:
                best = min(best, c)
            free -= gs
        if not free:
            total = sum(c for g, c in self.groups if set(g) & mem)
            best = min(best, total)
        return best

    def contains(self, other: "Ring") -> bool:
        """True when every monomial allowed by ``other`` is allowed here."""
        if other.vars != self.vars:
            return False
        if other.cap > self.cap:
            return False
        return all(other.max_group_degree(g) <= c for g, c in self.groups)

    def meet(self, other: "Ring") -> "Ring":
        if other.vars != self.vars:
            raise AlignmentError(f"rings over different variables: {self} vs {other}")
        return Ring(
            self.vars, min(self.cap, other.cap), list(self.groups) + list(other.groups)
        )

    def rename(self, mapping: dict[str, str]) -> "Ring":
        names = tuple(mapping.get(v, v) for v in self.vars)
        return Ring(names, self.cap, self.groups)


def meet_all(rings: Iterable[Ring]) -> Ring:
    rings = list(rings)
    out = rings[0]
    for r in rings[1:]:
        out = out.meet(r)
    return out
