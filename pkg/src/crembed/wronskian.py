"""Linear dependence of function families through generalized Wronskians.

A family ``H = (h_1, ..., h_N)`` of series together with derivations
``Lambda_1..Lambda_n`` spans the subspaces

    E_l(q) = span{ Lambda^alpha H(q) : 1 <= |alpha| <= l }.

When ``dim E_l = dim E_{l+1} = m < N`` at a generic point (and
``dim E_1 = n``), constants ``lambda`` with ``lambda . Lambda_j H = 0``
exist.  They are produced here as ratios of ``m x m`` minors and verified
on the series before being returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import CapExhaustedError, CrembedError
from .series import GaussianRational, Ring, TruncatedSeries, det_exact, meet_all, mul
from .series.linalg import rank_exact

Number = GaussianRational | int | Fraction


class DependenceError(CrembedError):
    """Extracted constants failed verification at every tried point."""


@dataclass(frozen=True)
class VectorFamily:
    """Components ``h_i`` (series in one ring) and derivations ``Lambda_j``.

    Each derivation is a mapping ``variable -> coefficient series``;
    ``None`` stands for the coordinate derivations.  ``polynomial`` marks
    exact polynomial data, which may be evaluated away from the origin.
    """

    components: tuple[TruncatedSeries, ...]
    fields: tuple[Mapping[str, TruncatedSeries], ...] | None = None
    polynomial: bool = True

    def __post_init__(self):
        if not self.components:
            raise ValueError("empty family")
        ring = self.components[0].ring
        if any(c.ring != ring for c in self.components):
            raise ValueError("components must share one ring")
        if self.fields is None:
            one = TruncatedSeries.one(ring)
            object.__setattr__(self, "fields", tuple({v: one} for v in ring.vars))
        object.__setattr__(self, "_cache", {})

    @classmethod
    def of(cls, ring: Ring, components: Sequence, fields=None, polynomial: bool = True) -> "VectorFamily":
        comps = []
        for c in components:
            if isinstance(c, TruncatedSeries):
                comps.append(c.truncate(ring) if c.ring != ring else c)
            else:
                comps.append(TruncatedSeries.from_dict(ring, c))
        return cls(tuple(comps), fields, polynomial)

    @property
    def ring(self) -> Ring:
        return self.components[0].ring

    @property
    def N(self) -> int:
        return len(self.components)

    @property
    def n(self) -> int:
        return len(self.fields)

    def apply_field(self, j: int, f: TruncatedSeries) -> TruncatedSeries:
        """``Lambda_j f`` (0-based ``j``); lowers the cap by one."""
        terms = []
        for var, coef in self.fields[j].items():
            d = f.derivative(var)
            terms.append((coef, d))
        ring = meet_all([r for c, d in terms for r in (c.ring, d.ring)])
        out = TruncatedSeries.zero(ring)
        for c, d in terms:
            out = out + mul(c.truncate(ring), d.truncate(ring))
        return out

    def derived(self, alpha: Sequence[int]) -> tuple[TruncatedSeries, ...]:
        """``Lambda^alpha H``, fields applied in nondecreasing index order
        (the rightmost factor acts first)."""
        alpha = tuple(alpha)
        got = self._cache.get(alpha)
        if got is not None:
            return got
        if not any(alpha):
            out = self.components
        else:
            j = max(i for i, a in enumerate(alpha) if a)
            prev = list(alpha)
            prev[j] -= 1
            out = tuple(self.apply_field(j, f) for f in self.derived(tuple(prev)))
        self._cache[alpha] = out
        return out

    def degree_bound(self, alpha: Sequence[int]) -> int:
        base = max(c.degree() for c in self.components)
        slack = max((c.degree() for fld in self.fields for c in fld.values()), default=0)
        return max(0, base + sum(alpha) * (slack - 1))

    def value(self, alpha: Sequence[int], q: Mapping[str, Number] | None) -> list[GaussianRational]:
        series = self.derived(alpha)
        if q is None or not any(GaussianRational.coerce(v) for v in q.values()):
            return [s.constant_term() for s in series]
        if not self.polynomial:
            raise CrembedError("truncated data can only be evaluated at the origin")
        if self.degree_bound(alpha) > series[0].ring.cap:
            raise CapExhaustedError(
                f"derivative {tuple(alpha)} may exceed cap {series[0].ring.cap}; raise the cap"
            )
        return [s.evaluate(q) for s in series]


def _indices(n: int, order: int) -> list[tuple[int, ...]]:
    from .prolong import multi_indices

    return multi_indices(n, order)


def _rows_up_to(fam: VectorFamily, q, level: int, start: int = 1) -> list[list[GaussianRational]]:
    rows = []
    for d in range(start, level + 1):
        for a in _indices(fam.n, d):
            rows.append(fam.value(a, q))
    return rows


@dataclass(frozen=True)
class SpanProfile:
    dims: tuple[int, ...]
    point: tuple | None = None

    def stabilization(self, total: int) -> tuple[int, int] | None:
        """First ``(l, m)`` with ``dims[l] == dims[l+1] == m < total``."""
        for l in range(1, len(self.dims)):
            if self.dims[l - 1] == self.dims[l] and self.dims[l] < total:
                return l, self.dims[l]
        return None

    def to_json(self) -> dict:
        return {"dims": list(self.dims)}


def span_dims(fam: VectorFamily, q: Mapping[str, Number] | None, L: int, with_values: bool = False) -> SpanProfile:
    """Exact ``dim E_l(q)`` for ``l = 1..L``.

    With ``with_values`` the undifferentiated vector ``H(q)`` is included in
    every span as well.
    """
    dims = []
    rows: list[list[GaussianRational]] = [fam.value((0,) * fam.n, q)] if with_values else []
    for d in range(1, L + 1):
        for a in _indices(fam.n, d):
            rows.append(fam.value(a, q))
        dims.append(rank_exact(rows))
    pt = None if q is None else tuple(sorted((k, str(v)) for k, v in q.items()))
    return SpanProfile(tuple(dims), pt)


def random_point(ring: Ring, rng: random.Random, height: int = 97) -> dict[str, GaussianRational]:
    return {
        v: GaussianRational(
            Fraction(rng.randint(-height, height), rng.randint(1, height)),
            Fraction(rng.randint(-height, height), rng.randint(1, height)),
        )
        for v in ring.vars
    }


@dataclass(frozen=True)
class GenericProfile:
    dims: tuple[int, ...]
    profiles: tuple[SpanProfile, ...]
    stable: bool


def generic_span_dims(fam: VectorFamily, L: int, seed: int = 0, points: int = 3, escalate: int = 3) -> GenericProfile:
    """Span dimensions at seeded random points.

    Generic ranks are maximal, so the profile is the entrywise maximum.
    When the sampled profiles disagree, ``escalate`` more points are tried;
    ``stable`` reports whether the final sample agreed.
    """
    rng = random.Random(seed)
    profs = [span_dims(fam, random_point(fam.ring, rng), L) for _ in range(points)]
    stable = len({p.dims for p in profs}) == 1
    if not stable:
        more = [span_dims(fam, random_point(fam.ring, rng), L) for _ in range(escalate)]
        profs += more
        stable = len({p.dims for p in more}) == 1
    dims = tuple(max(p.dims[i] for p in profs) for i in range(L))
    return GenericProfile(dims, tuple(profs), stable)


def _independent(rows: list[list[GaussianRational]]) -> tuple[list[int], list[int]]:
    """Indices of a maximal independent set of rows and the pivot columns."""
    basis: list[tuple[int, list[GaussianRational]]] = []
    chosen_rows = []
    for ri, row in enumerate(rows):
        r = list(row)
        for piv, b in basis:
            if r[piv]:
                c = r[piv]
                r = [x - c * y for x, y in zip(r, b)]
        piv = next((i for i, x in enumerate(r) if x), None)
        if piv is None:
            continue
        inv = r[piv].inverse()
        basis.append((piv, [x * inv for x in r]))
        chosen_rows.append(ri)
    return chosen_rows, [p for p, _ in basis]


def normalize(vec: Sequence[Number]) -> tuple[GaussianRational, ...]:
    """Scale so the first nonzero entry is 1."""
    vec = [GaussianRational.coerce(x) for x in vec]
    lead = next((x for x in vec if x), None)
    if lead is None:
        return tuple(vec)
    inv = lead.inverse()
    return tuple(x * inv for x in vec)


def dependence_from_minors(rows: list[list[GaussianRational]], extra: int) -> list[GaussianRational]:
    """Constants from ``m`` independent rows ``V`` and a column ``extra``
    outside the pivot set: ``lambda_i = +-det V[:, S + {extra} - {i}] / det V[:, S]``
    on ``S + {extra}`` and zero elsewhere.  Each ``lambda . row`` is a
    determinant with a repeated row, hence zero."""
    _, pivots = _independent(rows)
    cols = sorted(pivots + [extra])
    width = len(rows[0])
    base = det_exact([[r[c] for c in pivots] for r in rows])
    lam = [GaussianRational(0)] * width
    for pos, c in enumerate(cols):
        others = [x for x in cols if x != c]
        minor = det_exact([[r[x] for x in others] for r in rows])
        sign = 1 if (len(cols) - 1 - pos) % 2 == 0 else -1
        lam[c] = minor * sign / base
    return lam


def _verify(fam: VectorFamily, lam: Sequence[GaussianRational], with_values: bool = False) -> bool:
    alphas = [tuple(1 if i == j else 0 for i in range(fam.n)) for j in range(fam.n)]
    if with_values:
        alphas.insert(0, (0,) * fam.n)
    for alpha in alphas:
        series = fam.derived(alpha)
        total = TruncatedSeries.zero(series[0].ring)
        for c, s in zip(lam, series):
            if c:
                total = total + s.scale(c)
        if not total.is_zero():
            return False
    return True


def extract_dependence(
    fam: VectorFamily,
    q: Mapping[str, Number] | None = None,
    l: int | None = None,
    max_level: int = 8,
    seed: int = 0,
    retries: int = 3,
    with_values: bool = False,
) -> tuple[GaussianRational, ...] | None:
    """Constants ``lambda`` (first nonzero entry 1) with ``lambda . Lambda_j H = 0``.

    ``l`` is the stabilization level; by default the first level where
    ``E_l = E_{l+1}`` with dimension below ``N``.  Returns ``None`` when no
    such level exists up to ``max_level`` (no dependence is implied) or when
    ``dim E_1 != n``.  If the constants computed at ``q`` fail verification
    on the series, fresh random points are tried before giving up with
    :class:`DependenceError`.

    With ``with_values`` the constants must annihilate ``H`` itself; the
    spans then include ``H(q)`` and the condition on ``dim E_1`` is dropped.
    This is the form in which a vanishing Wronskian-type determinant with an
    undifferentiated first row is certified.
    """
    rng = random.Random(seed)
    points = [q] + [random_point(fam.ring, rng) for _ in range(retries if fam.polynomial else 0)]
    top = (l + 1) if l is not None else max_level
    tried = False
    for pt in points:
        prof = span_dims(fam, pt, top, with_values)
        if not with_values and prof.dims[0] != fam.n:
            continue
        if l is not None:
            if not prof.dims[l - 1] == prof.dims[l] < fam.N:
                continue
            level = l
        else:
            st = prof.stabilization(fam.N)
            if st is None:
                return None
            level = st[0]
        tried = True
        rows = _rows_up_to(fam, pt, level, 0 if with_values else 1)
        chosen, pivots = _independent(rows)
        indep = [rows[i] for i in chosen]
        extra = next(c for c in range(fam.N) if c not in pivots)
        lam = normalize(dependence_from_minors(indep, extra))
        if _verify(fam, lam, with_values):
            return lam
    if not tried:
        return None
    raise DependenceError("extracted constants do not annihilate the derivatives")


def bordered_vanishing_implies_zero(B: Sequence[Sequence[Number]], a: Sequence[Number]) -> bool:
    """Whether every bordered determinant ``det(b_{i_1}, ..., b_{i_{s-1}}, a)``
    vanishes, where ``b_i`` are the columns of a nonsingular ``B``.

    The two conditions "all bordered determinants vanish" and "a = 0" are
    computed independently and must agree; a disagreement raises
    ``AssertionError``.
    """
    Bm = [[GaussianRational.coerce(x) for x in row] for row in B]
    av = [GaussianRational.coerce(x) for x in a]
    s = len(Bm)
    if any(len(r) != s for r in Bm) or len(av) != s:
        raise ValueError("B must be square and a must match its size")
    if not det_exact(Bm):
        raise CrembedError("B is singular")
    cols = [[Bm[r][c] for r in range(s)] for c in range(s)]
    all_zero = True
    for drop in range(s):
        kept = [cols[c] for c in range(s) if c != drop] + [av]
        mat = [[kept[c][r] for c in range(s)] for r in range(s)]
        if det_exact(mat):
            all_zero = False
            break
    is_zero = not any(av)
    assert all_zero == is_zero, "bordered determinants disagree with the zero test"
    return all_zero


# ---------------------------------------------------------------------------
# oracle for the obstruction determinant


def fibre_family(row0: Sequence[TruncatedSeries], n: int) -> VectorFamily:
    """Restrict the functions ``h~_t(z, w, xi)`` to the ``xi``-fibre over the
    expansion point and view them as a family in ``xi`` with the coordinate
    derivations."""
    from .assoc_pde import xi_names
    from .hypersurface import z_names

    fixed = z_names(n) + ["w"]
    restricted = [s.restrict_to_zero(fixed) for s in row0]
    ring = meet_all([s.ring for s in restricted])
    xs = xi_names(n)
    sub = Ring(tuple(xs), ring.cap)
    comps = []
    for s in restricted:
        idx = [s.ring.index(x) for x in xs]
        coeffs = {tuple(e[i] for i in idx): c for e, c in s.terms() if sum(e[i] for i in idx) <= ring.cap}
        comps.append(TruncatedSeries.from_dict(sub, coeffs))
    return VectorFamily(tuple(comps), None, polynomial=False)
