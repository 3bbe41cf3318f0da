"""Truncated multivariate power series over Q(i).

A series stores the coefficients of the monomials allowed by its
:class:`~crembed.series.ring.Ring` with a single common denominator::

    value = sum((re[k] + im[k] i) / den * x^exps(keys[k]))

Terms are kept in canonical order (total degree ascending, then exponent
tuples lexicographically descending), which the multiplication kernel relies
on for early exit.  Arithmetic never silently combines series from different
rings; use :meth:`TruncatedSeries.truncate` or :meth:`TruncatedSeries.lift`
to align them explicitly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from ..errors import (
    AlignmentError,
    CapExhaustedError,
    NotAUnitError,
    SubstitutionError,
)
from . import _backend
from .gaussian import GaussianRational, Number
from .ring import Ring

Scalar = Union[GaussianRational, int, Fraction]


def _scalar_ints(c: Scalar) -> tuple[int, int, int]:
    return GaussianRational.coerce(c).as_ints()


class TruncatedSeries:
    __slots__ = ("ring", "_den", "_keys", "_degs", "_gdegs", "_re", "_im", "_hash")

    # -- construction ---------------------------------------------------
    @classmethod
    def _raw(cls, ring, den, keys, degs, gdegs, re, im) -> "TruncatedSeries":
        obj = object.__new__(cls)
        obj.ring = ring
        obj._den = den
        obj._keys = keys
        obj._degs = degs
        obj._gdegs = gdegs
        obj._re = re
        obj._im = im
        obj._hash = None
        return obj

    @classmethod
    def _from_acc(cls, ring: Ring, den: int, acc: Mapping[int, Sequence[int]]):
        """Build from ``{key: (re, im)}``; drops zeros and normalizes."""
        items = [(k, v[0], v[1]) for k, v in acc.items() if v[0] or v[1]]
        if not items:
            return cls.zero(ring)
        rows = []
        for k, r, i in items:
            e = ring.exps(k)
            rows.append((sum(e), -k, k, r, i, ring.gdegs(e)))
        rows.sort()
        g = math.gcd(den, *[r[3] for r in rows], *[r[4] for r in rows])
        if den < 0:
            g = -g
        keys = tuple(r[2] for r in rows)
        degs = tuple(r[0] for r in rows)
        gd: list[int] = []
        for r in rows:
            gd.extend(r[5])
        return cls._raw(
            ring,
            den // g,
            keys,
            degs,
            tuple(gd),
            tuple(r[3] // g for r in rows),
            tuple(r[4] // g for r in rows),
        )

    @classmethod
    def zero(cls, ring: Ring) -> "TruncatedSeries":
        return cls._raw(ring, 1, (), (), (), (), ())

    @classmethod
    def constant(cls, ring: Ring, c: Scalar) -> "TruncatedSeries":
        p, q, d = _scalar_ints(c)
        return cls._from_acc(ring, d, {0: (p, q)})

    @classmethod
    def one(cls, ring: Ring) -> "TruncatedSeries":
        return cls.constant(ring, 1)

    @classmethod
    def variable(cls, ring: Ring, name: str) -> "TruncatedSeries":
        v = ring.index(name)
        exps = [0] * ring.nvars
        exps[v] = 1
        if not ring.allows(exps):
            return cls.zero(ring)
        return cls._from_acc(ring, 1, {ring.key(exps): (1, 0)})

    @classmethod
    def from_dict(
        cls, ring: Ring, coeffs: Mapping[Sequence[int], Scalar], strict: bool = True
    ) -> "TruncatedSeries":
        """Build from ``{exponent tuple: coefficient}``.

        Monomials outside the ring raise unless ``strict`` is false, in which
        case they are dropped (a truncation).
        """
        parts = []
        den = 1
        for exps, c in coeffs.items():
            exps = tuple(exps)
            if not ring.allows(exps):
                if strict and GaussianRational.coerce(c):
                    raise CapExhaustedError(f"monomial {exps} not allowed in {ring}")
                continue
            p, q, d = _scalar_ints(c)
            parts.append((ring.key(exps), p, q, d))
            den = den * d // math.gcd(den, d)
        acc: dict[int, list[int]] = {}
        for k, p, q, d in parts:
            f = den // d
            slot = acc.setdefault(k, [0, 0])
            slot[0] += p * f
            slot[1] += q * f
        return cls._from_acc(ring, den, acc)

    # -- inspection -------------------------------------------------------
    @property
    def vars(self) -> tuple[str, ...]:
        return self.ring.vars

    @property
    def cap(self) -> int:
        return self.ring.cap

    @property
    def denominator(self) -> int:
        return self._den

    def __len__(self) -> int:
        return len(self._keys)

    def is_zero(self) -> bool:
        return not self._keys

    def terms(self) -> Iterator[tuple[tuple[int, ...], GaussianRational]]:
        for k, r, i in zip(self._keys, self._re, self._im):
            yield self.ring.exps(k), GaussianRational.from_ints(r, i, self._den)

    def to_dict(self) -> dict[tuple[int, ...], GaussianRational]:
        return dict(self.terms())

    def coeff(self, exps: Sequence[int]) -> GaussianRational:
        k = self.ring.key(tuple(exps))
        for kk, r, i in zip(self._keys, self._re, self._im):
            if kk == k:
                return GaussianRational.from_ints(r, i, self._den)
        return GaussianRational(0)

    def constant_term(self) -> GaussianRational:
        if self._degs and self._degs[0] == 0:
            return GaussianRational.from_ints(self._re[0], self._im[0], self._den)
        return GaussianRational(0)

    def order(self) -> int | None:
        """Lowest total degree with a nonzero coefficient (``None`` for zero)."""
        return self._degs[0] if self._degs else None

    def degree(self) -> int:
        return self._degs[-1] if self._degs else -1

    def is_real_coefficients(self) -> bool:
        return not any(self._im)

    # -- comparison -------------------------------------------------------
    def _check_ring(self, other: "TruncatedSeries") -> None:
        if other.ring is not self.ring:
            raise AlignmentError(
                f"series over {self.ring} and {other.ring} must be aligned explicitly"
            )

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TruncatedSeries):
            return (
                self.ring is other.ring
                and self._den == other._den
                and self._keys == other._keys
                and self._re == other._re
                and self._im == other._im
            )
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == TruncatedSeries.constant(self.ring, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self._den, self._keys, self._re, self._im))
        return self._hash

    # -- linear operations ----------------------------------------------
    def _combine(self, other: "TruncatedSeries", sign: int) -> "TruncatedSeries":
        self._check_ring(other)
        if not other._keys:
            return self
        if not self._keys:
            return other if sign > 0 else -other
        den = self._den * other._den // math.gcd(self._den, other._den)
        fa = den // self._den
        fb = sign * (den // other._den)
        acc: dict[int, list[int]] = {}
        for k, r, i in zip(self._keys, self._re, self._im):
            acc[k] = [r * fa, i * fa]
        for k, r, i in zip(other._keys, other._re, other._im):
            slot = acc.get(k)
            if slot is None:
                acc[k] = [r * fb, i * fb]
            else:
                slot[0] += r * fb
                slot[1] += i * fb
        return TruncatedSeries._from_acc(self.ring, den, acc)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return self._combine(other, 1)
        try:
            return self._combine(TruncatedSeries.constant(self.ring, other), 1)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self._combine(other, -1)
        try:
            return self._combine(TruncatedSeries.constant(self.ring, other), -1)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            self.ring,
            self._den,
            self._keys,
            self._degs,
            self._gdegs,
            tuple(-r for r in self._re),
            tuple(-i for i in self._im),
        )

    def scale(self, c: Scalar) -> "TruncatedSeries":
        p, q, d = _scalar_ints(c)
        if not p and not q:
            return TruncatedSeries.zero(self.ring)
        acc = {
            k: (r * p - i * q, r * q + i * p)
            for k, r, i in zip(self._keys, self._re, self._im)
        }
        return TruncatedSeries._from_acc(self.ring, self._den * d, acc)

    def conjugate_coefficients(self) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            self.ring,
            self._den,
            self._keys,
            self._degs,
            self._gdegs,
            self._re,
            tuple(-i for i in self._im),
        )

    # -- multiplication -------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, invert_unit(other))
        return self.scale(GaussianRational.coerce(other).inverse())

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            return invert_unit(self) ** (-k)
        out = TruncatedSeries.one(self.ring)
        base = self
        while k:
            if k & 1:
                out = mul(out, base)
            k >>= 1
            if k:
                base = mul(base, base)
        return out

    # -- truncation -------------------------------------------------------
    def truncate(self, ring: Ring) -> "TruncatedSeries":
        """Drop the monomials outside ``ring`` (which must lie inside ours)."""
        if ring is self.ring:
            return self
        if not self.ring.contains(ring):
            raise CapExhaustedError(f"cannot truncate {self.ring} to larger {ring}")
        return self._restrict(ring)

    def _restrict(self, ring: Ring) -> "TruncatedSeries":
        acc = {}
        for k, r, i in zip(self._keys, self._re, self._im):
            if ring.allows(self.ring.exps(k)):
                acc[k] = (r, i)
        return TruncatedSeries._from_acc(ring, self._den, acc)

    def with_cap(self, cap: int) -> "TruncatedSeries":
        return self.truncate(self.ring.with_cap(cap))

    def lift(self, ring: Ring) -> "TruncatedSeries":
        """Reinterpret inside a larger ring, treating unknown terms as zero.

        Only sound when the caller knows the missing coefficients cannot
        influence the result, e.g. before multiplying by a series whose
        order makes up the difference.  Exact polynomials lift freely.
        """
        if ring.vars != self.ring.vars:
            raise AlignmentError(f"cannot lift {self.ring} to {ring}")
        return self._restrict(ring)

    def rename(self, mapping: Mapping[str, str]) -> "TruncatedSeries":
        ring = self.ring.rename(dict(mapping))
        return TruncatedSeries._raw(
            ring, self._den, self._keys, self._degs, self._gdegs, self._re, self._im
        )

    def embed(self, ring: Ring) -> "TruncatedSeries":
        """Map into a ring whose variables include ours.

        Every monomial of ``ring`` that only involves our variables must be
        allowed here; monomials outside ``ring`` are dropped.
        """
        if ring is self.ring:
            return self
        try:
            pos = [ring.index(v) for v in self.ring.vars]
        except AlignmentError:
            raise AlignmentError(f"cannot embed {self.ring} into {ring}") from None
        # coverage: the restriction of ``ring`` to our variables
        if ring.cap > self.ring.cap:
            raise CapExhaustedError(f"embedding {self.ring} into {ring} needs cap {ring.cap}")
        for g, c in self.ring.groups:
            img = [pos[v] for v in g]
            if ring.max_group_degree(img) > c:
                raise CapExhaustedError(f"embedding {self.ring} into {ring} exceeds a group cap")
        acc = {}
        n = ring.nvars
        for k, r, i in zip(self._keys, self._re, self._im):
            e = self.ring.exps(k)
            new = [0] * n
            for v, ev in zip(pos, e):
                new[v] = ev
            if ring.allows(new):
                acc[ring.key(new)] = (r, i)
        return TruncatedSeries._from_acc(ring, self._den, acc)

    # -- calculus ---------------------------------------------------------
    def derivative(self, var: Union[str, int], times: int = 1) -> "TruncatedSeries":
        v = self.ring.index(var) if isinstance(var, str) else var
        out = self
        for _ in range(times):
            out = out._derivative_once(v)
        return out

    def _derivative_once(self, v: int) -> "TruncatedSeries":
        ring = self.ring.derivative(v)
        unit = self.ring.unit_key(v)
        shift = self.ring._shifts[v]
        acc = {}
        for k, r, i in zip(self._keys, self._re, self._im):
            e = (k >> shift) & 0xFF
            if e:
                nk = k - unit
                if ring.allows(ring.exps(nk)):
                    acc[nk] = (r * e, i * e)
        return TruncatedSeries._from_acc(ring, self._den, acc)

    def partial(self, orders: Mapping[str, int] | Sequence[int]) -> "TruncatedSeries":
        """Mixed partial derivative; ``orders`` maps variables to counts."""
        out = self
        if isinstance(orders, Mapping):
            items = orders.items()
        else:
            items = zip(self.ring.vars, orders)
        for name, cnt in items:
            if cnt:
                out = out.derivative(name, cnt)
        return out

    # -- evaluation -------------------------------------------------------
    def evaluate(self, point: Mapping[str, Number] | Sequence[Number]) -> GaussianRational:
        """Evaluate the stored polynomial exactly.

        This equals the value of the underlying germ only when the data is
        an exact polynomial or the point is the origin.
        """
        if isinstance(point, Mapping):
            vals = [GaussianRational.coerce(point.get(v, 0)) for v in self.ring.vars]
        else:
            vals = [GaussianRational.coerce(x) for x in point]
        powers: list[dict[int, GaussianRational]] = [{0: GaussianRational(1)} for _ in vals]
        total = GaussianRational(0)
        for exps, c in self.terms():
            t = c
            for v, e in enumerate(exps):
                if e:
                    pw = powers[v]
                    if e not in pw:
                        pw[e] = vals[v] ** e
                    t = t * pw[e]
            total = total + t
        return total

    def restrict_to_zero(self, names: Iterable[str]) -> "TruncatedSeries":
        """Set the given variables to zero (keeps the ring)."""
        idx = [self.ring.index(n) for n in names]
        acc = {}
        for k, r, i in zip(self._keys, self._re, self._im):
            e = self.ring.exps(k)
            if all(e[v] == 0 for v in idx):
                acc[k] = (r, i)
        return TruncatedSeries._from_acc(self.ring, self._den, acc)

    def substitute(self, assignment, ring=None, polynomial=False):
        return substitute(self, assignment, ring=ring, polynomial=polynomial)

    # -- text -------------------------------------------------------------
    def __str__(self) -> str:
        from .text import to_text

        return to_text(self)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.ring!r}: {self})"


# ---------------------------------------------------------------------------
# module-level operations


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product truncated to the common ring."""
    a._check_ring(b)
    ring = a.ring
    if not a._keys or not b._keys:
        return TruncatedSeries.zero(ring)
    if len(a._keys) > len(b._keys):
        a, b = b, a
    acc = _backend.mul_terms(
        a._keys, a._degs, a._gdegs, a._re, a._im,
        b._keys, b._degs, b._gdegs, b._re, b._im,
        ring.cap, ring.gcaps,
    )
    items = [(k, v) for k, v in acc.items() if v[0] or v[1]]
    if not items:
        return TruncatedSeries.zero(ring)
    ng = len(ring.gcaps)
    rows = []
    for k, v in items:
        i, j = v[2], v[3]
        d = a._degs[i] + b._degs[j]
        if ng:
            gd = tuple(a._gdegs[i * ng + g] + b._gdegs[j * ng + g] for g in range(ng))
        else:
            gd = ()
        rows.append((d, -k, k, v[0], v[1], gd))
    rows.sort()
    den = a._den * b._den
    g = math.gcd(den, *[r[3] for r in rows], *[r[4] for r in rows])
    flat: list[int] = []
    for r in rows:
        flat.extend(r[5])
    return TruncatedSeries._raw(
        ring,
        den // g,
        tuple(r[2] for r in rows),
        tuple(r[0] for r in rows),
        tuple(flat),
        tuple(r[3] // g for r in rows),
        tuple(r[4] // g for r in rows),
    )


def partial_derivative(s: TruncatedSeries, var: Union[str, int], times: int = 1) -> TruncatedSeries:
    return s.derivative(var, times)


def linear_combination(
    ring: Ring, pairs: Iterable[tuple[Scalar, TruncatedSeries]]
) -> TruncatedSeries:
    """``sum(c * s)`` with a single normalization pass."""
    parts = []
    den = 1
    for c, s in pairs:
        if s.ring is not ring:
            raise AlignmentError(f"series over {s.ring} in a combination over {ring}")
        p, q, d = _scalar_ints(c)
        if (not p and not q) or not s._keys:
            continue
        dd = d * s._den
        parts.append((p, q, dd, s))
        den = den * dd // math.gcd(den, dd)
    acc: dict[int, list[int]] = {}
    for p, q, dd, s in parts:
        f = den // dd
        pf, qf = p * f, q * f
        for k, r, i in zip(s._keys, s._re, s._im):
            rr = r * pf - i * qf
            ii = r * qf + i * pf
            slot = acc.get(k)
            if slot is None:
                acc[k] = [rr, ii]
            else:
                slot[0] += rr
                slot[1] += ii
    return TruncatedSeries._from_acc(ring, den, acc)


def invert_unit(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; the constant term must be nonzero."""
    c0 = s.constant_term()
    if not c0:
        raise NotAUnitError("series with zero constant term is not invertible")
    ring = s.ring
    y = TruncatedSeries.constant(ring, c0.inverse())
    prec = 0
    while prec < ring.cap:
        prec = min(2 * prec + 1, ring.cap)
        sub = ring.with_cap(prec)
        ys = y.lift(sub)
        ss = s.truncate(sub)
        y = mul(ys, 2 - mul(ss, ys))
    return y.lift(ring) if y.ring is not ring else y


def _coverage_check(s: TruncatedSeries, kept_pos: dict[int, int], target: Ring) -> None:
    if s.ring.cap < target.cap:
        raise CapExhaustedError(
            f"composition into {target} needs coefficients up to degree {target.cap}, "
            f"source is known to {s.ring.cap}"
        )
    for g, c in s.ring.groups:
        if c >= target.cap:
            continue
        if not all(v in kept_pos for v in g):
            raise CapExhaustedError(
                f"group cap on substituted variables of {s.ring} cannot cover {target}"
            )
        img = [kept_pos[v] for v in g]
        if target.max_group_degree(img) > c:
            raise CapExhaustedError(f"group cap of {s.ring} does not cover {target}")


def substitute(
    s: TruncatedSeries,
    assignment: Mapping[str, Union[TruncatedSeries, Scalar]],
    ring: Ring | None = None,
    polynomial: bool = False,
) -> TruncatedSeries:
    """Compose ``s`` with the given series.

    Variables of ``s`` that are not assigned are carried over by name into
    the target ring.  Substituted series must have zero constant term unless
    ``polynomial`` declares ``s`` to be an exact polynomial (so that no unknown
    higher-order terms of ``s`` can leak into low degrees).
    """
    if ring is None:
        for val in assignment.values():
            if isinstance(val, TruncatedSeries):
                ring = val.ring
                break
        else:
            raise ValueError("target ring required when no series is substituted")
    sub_idx: list[int] = []
    sub_vals: list[TruncatedSeries] = []
    has_const = False
    for name, val in assignment.items():
        v = s.ring.index(name)
        if not isinstance(val, TruncatedSeries):
            val = TruncatedSeries.constant(ring, val)
        if val.ring is not ring:
            raise AlignmentError(f"substituted series for {name} lives in {val.ring}, not {ring}")
        if val.constant_term():
            has_const = True
        sub_idx.append(v)
        sub_vals.append(val)
    if has_const and not polynomial:
        raise SubstitutionError(
            "substituted series with nonzero constant term into a truncated series"
        )
    kept = [v for v in range(s.ring.nvars) if v not in sub_idx]
    kept_pos = {v: ring.index(s.ring.vars[v]) for v in kept}
    if not polynomial:
        _coverage_check(s, kept_pos, ring)

    groups: dict[tuple[int, ...], dict[int, list[int]]] = {}
    n = ring.nvars
    for k, r, i in zip(s._keys, s._re, s._im):
        e = s.ring.exps(k)
        sub_e = tuple(e[v] for v in sub_idx)
        new = [0] * n
        for v in kept:
            new[kept_pos[v]] = e[v]
        if not ring.allows(new):
            continue
        nk = ring.key(new)
        bucket = groups.setdefault(sub_e, {})
        slot = bucket.get(nk)
        if slot is None:
            bucket[nk] = [r, i]
        else:
            slot[0] += r
            slot[1] += i

    one = TruncatedSeries.one(ring)
    powers: dict[tuple[int, ...], TruncatedSeries] = {tuple(0 for _ in sub_idx): one}

    def power(e: tuple[int, ...]) -> TruncatedSeries:
        got = powers.get(e)
        if got is not None:
            return got
        for t, et in enumerate(e):
            if et:
                prev = list(e)
                prev[t] -= 1
                got = mul(power(tuple(prev)), sub_vals[t])
                break
        powers[e] = got
        return got

    pairs = []
    for sub_e in sorted(groups, key=lambda t: (sum(t), t)):
        p = power(sub_e)
        if p.is_zero():
            continue
        kept_series = TruncatedSeries._from_acc(ring, 1, groups[sub_e])
        if kept_series.is_zero():
            continue
        pairs.append((kept_series, p))
    prods = [(1, mul(a, b)) for a, b in pairs]
    out = linear_combination(ring, prods)
    if s._den != 1:
        out = out.scale(Fraction(1, s._den))
    return out


def series_from_polynomial(
    ring: Ring, coeffs: Mapping[Sequence[int], Scalar]
) -> TruncatedSeries:
    """Alias of :meth:`TruncatedSeries.from_dict` in strict mode."""
    return TruncatedSeries.from_dict(ring, coeffs)


def shift_polynomial(
    s: TruncatedSeries, offsets: Mapping[str, Scalar], ring: Ring | None = None
) -> TruncatedSeries:
    """Exact translation ``x -> x + offset`` of a polynomial.

    ``s`` must be an exact polynomial; the result is re-expanded around the
    new origin, with its constant term kept.
    """
    ring = ring or s.ring
    assignment = {}
    for name in s.ring.vars:
        var = TruncatedSeries.variable(ring, name)
        c = offsets.get(name, 0)
        assignment[name] = var + c if GaussianRational.coerce(c) else var
    return substitute(s, assignment, ring=ring, polynomial=True)
