"""Exact determinants over Q(i) and over truncated series rings."""

from __future__ import annotations

import math
from functools import reduce
from typing import Sequence

from ..errors import CapExhaustedError, DivisionError, NotAUnitError
from .core import TruncatedSeries, invert_unit, linear_combination, mul
from .gaussian import GaussianRational, Number
from .ring import Ring

# ---------------------------------------------------------------------------
# Gaussian integers as (re, im) pairs


def _gi_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gi_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gi_exact_div(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    re = a[0] * b[0] + a[1] * b[1]
    im = a[1] * b[0] - a[0] * b[1]
    q_re, r_re = divmod(re, n)
    q_im, r_im = divmod(im, n)
    if r_re or r_im:
        raise DivisionError("inexact Gaussian-integer division in Bareiss elimination")
    return (q_re, q_im)


def det_exact(matrix: Sequence[Sequence[Number]]) -> GaussianRational:
    """Exact determinant by fraction-free (Bareiss) elimination over Z[i]."""
    n = len(matrix)
    if n == 0:
        return GaussianRational(1)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    rows = []
    scale = 1
    for row in matrix:
        vals = [GaussianRational.coerce(x).as_ints() for x in row]
        d = reduce(lambda x, y: x * y // math.gcd(x, y), (v[2] for v in vals), 1)
        rows.append([(p * (d // dd), q * (d // dd)) for p, q, dd in vals])
        scale *= d
    sign = 1
    prev = (1, 0)
    for k in range(n - 1):
        if rows[k][k] == (0, 0):
            for r in range(k + 1, n):
                if rows[r][k] != (0, 0):
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return GaussianRational(0)
        pk = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            ri = rows[i]
            rk = rows[k]
            for j in range(k + 1, n):
                num = _gi_sub(_gi_mul(pk, ri[j]), _gi_mul(rik, rk[j]))
                ri[j] = _gi_exact_div(num, prev) if prev != (1, 0) else num
            ri[k] = (0, 0)
        prev = pk
    d = rows[n - 1][n - 1]
    return GaussianRational.from_ints(sign * d[0], sign * d[1], scale)


def rank_exact(matrix: Sequence[Sequence[Number]]) -> int:
    """Rank over Q(i) by Gaussian elimination."""
    rows = [[GaussianRational.coerce(x) for x in row] for row in matrix]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def solve_exact(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> list[GaussianRational]:
    """Solve a nonsingular square system exactly."""
    n = len(matrix)
    aug = [[GaussianRational.coerce(x) for x in row] + [GaussianRational.coerce(b)]
           for row, b in zip(matrix, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = aug[c][c].inverse()
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [row[n] for row in aug]


# ---------------------------------------------------------------------------
# series matrices


def _common_ring(matrix) -> Ring:
    rings = {x.ring for row in matrix for x in row}
    if len(rings) != 1:
        raise ValueError("matrix entries must share one ring; align them first")
    return rings.pop()


def _det_cofactor(matrix, ring: Ring) -> TruncatedSeries:
    n = len(matrix)
    memo: dict[tuple[int, int], TruncatedSeries] = {}

    def rec(row: int, cols: int) -> TruncatedSeries:
        # determinant of rows row.. and the columns whose bit is set in cols
        if row == n:
            return TruncatedSeries.one(ring)
        key = (row, cols)
        got = memo.get(key)
        if got is not None:
            return got
        pairs = []
        sign = 1
        for c in range(n):
            if cols >> c & 1:
                entry = matrix[row][c]
                if not entry.is_zero():
                    sub = rec(row + 1, cols & ~(1 << c))
                    if not sub.is_zero():
                        pairs.append((sign, mul(entry, sub)))
                sign = -sign
        got = linear_combination(ring, pairs)
        memo[key] = got
        return got

    return rec(0, (1 << n) - 1)


def exact_divide(a: TruncatedSeries, p: TruncatedSeries) -> TruncatedSeries:
    """Quotient ``a / p`` known to be exact in the power-series ring.

    Uses division by the leading term of the lowest homogeneous part; the
    quotient is returned with cap ``min(a.cap, p.cap) - ord(p)``.  A
    non-divisible leading term raises :class:`DivisionError`.
    """
    ring = a.ring
    if p.ring is not ring:
        raise ValueError("exact_divide needs operands from one ring")
    if ring.groups:
        raise NotImplementedError("exact division in rings with group caps")
    if p.is_zero():
        raise DivisionError("division by a series that vanishes to its cap")
    v = p.order()
    qcap = ring.cap - v
    if qcap < 0:
        raise CapExhaustedError("no precision left after division")
    terms_p = [(e, c) for e, c in p.terms() if sum(e) == v]
    lead_e, lead_c = max(terms_p, key=lambda t: t[0])
    lead_inv = lead_c.inverse()
    rem = {e: c for e, c in a.terms()}
    quot: dict[tuple[int, ...], GaussianRational] = {}
    ptms = list(p.terms())
    limit = ring.cap
    while True:
        live = [e for e, c in rem.items() if c and sum(e) <= limit]
        if not live:
            break
        e = min(live, key=lambda t: (sum(t), tuple(-x for x in t)))
        diff = tuple(x - y for x, y in zip(e, lead_e))
        if any(x < 0 for x in diff) or sum(diff) > qcap:
            raise DivisionError("series division is not exact")
        f = rem[e] * lead_inv
        quot[diff] = quot.get(diff, GaussianRational(0)) + f
        for pe, pc in ptms:
            t = tuple(x + y for x, y in zip(diff, pe))
            if sum(t) <= limit:
                rem[t] = rem.get(t, GaussianRational(0)) - f * pc
        rem.pop(e, None) if not rem.get(e) else None
    return TruncatedSeries.from_dict(ring.with_cap(qcap), quot)


def _det_bareiss(matrix, ring: Ring) -> TruncatedSeries:
    n = len(matrix)
    m = [list(row) for row in matrix]
    sign = 1
    prev = None
    for k in range(n - 1):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                o = m[i][j].order()
                if o is not None and (best is None or o < best[0]):
                    best = (o, i, j)
        if best is None:
            return TruncatedSeries.zero(m[k][k].ring)
        _, bi, bj = best
        if bi != k:
            m[k], m[bi] = m[bi], m[k]
            sign = -sign
        if bj != k:
            for row in m:
                row[k], row[bj] = row[bj], row[k]
            sign = -sign
        pk = m[k][k]
        cur = pk.ring
        if prev is not None:
            prev = prev.truncate(cur)
            new_ring = cur.with_cap(cur.cap - prev.order())
        else:
            new_ring = cur
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = mul(pk, m[i][j]) - mul(m[i][k], m[k][j])
                if prev is not None:
                    num = exact_divide(num, prev)
                m[i][j] = num.truncate(new_ring) if num.ring is not new_ring else num
        prev = pk
    out = m[n - 1][n - 1]
    return out if sign > 0 else -out


def det_series(matrix: Sequence[Sequence[TruncatedSeries]]) -> TruncatedSeries:
    """Determinant of a square matrix of series.

    Cofactor expansion (memoized over column subsets) is used up to size 6;
    larger matrices use Bareiss elimination with exact series division,
    which tracks the precision lost to pivots.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        raise ValueError("empty matrix")
    ring = _common_ring(matrix)
    if n <= 6:
        return _det_cofactor(matrix, ring)
    return _det_bareiss(matrix, ring)


def invert_series_matrix(matrix: Sequence[Sequence[TruncatedSeries]]):
    """Inverse of a square series matrix whose constant part is invertible."""
    n = len(matrix)
    ring = _common_ring(matrix)
    aug = [list(row) + [TruncatedSeries.one(ring) if i == j else TruncatedSeries.zero(ring)
                        for j in range(n)] for i, row in enumerate(matrix)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c].constant_term()), None)
        if piv is None:
            raise NotAUnitError("series matrix is singular at the origin")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = invert_unit(aug[c][c])
        aug[c] = [mul(x, inv) for x in aug[c]]
        for i in range(n):
            if i != c and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [x - mul(f, y) for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def constant_matrix(matrix: Sequence[Sequence[TruncatedSeries]]) -> list[list[GaussianRational]]:
    return [[x.constant_term() for x in row] for row in matrix]


# ---------------------------------------------------------------------------
# univariate truncated determinants (valuation-aware elimination)


def det_univariate(matrix: Sequence[Sequence[Sequence[GaussianRational]]], prec: int) -> list[GaussianRational]:
    """Determinant over ``Q(i)[t]/(t^prec)``.

    Entries are coefficient lists (index = power of t).  Elimination uses
    full pivoting on minimal valuation, which loses no precision: the result
    is exact modulo ``t^prec``.
    """
    ring = Ring(("t",), prec - 1)
    def series(coeffs):
        return TruncatedSeries.from_dict(ring, {(k,): c for k, c in enumerate(coeffs[:prec]) if c})
    m = [[series(list(e)) for e in row] for row in matrix]
    return [c for c in _det_univariate_series(m, prec)]


def _shift_down(s: TruncatedSeries, v: int, ring: Ring) -> TruncatedSeries:
    # divide by t^v (s has valuation >= v); result known mod t^(prec - v)
    acc = {}
    for (e,), c in s.terms():
        if e - v <= ring.cap:
            acc[(e - v,)] = c
    return TruncatedSeries.from_dict(ring, acc)


def _shift_up(s: TruncatedSeries, v: int, ring: Ring) -> TruncatedSeries:
    acc = {}
    for (e,), c in s.terms():
        if e + v <= ring.cap:
            acc[(e + v,)] = c
    return TruncatedSeries.from_dict(ring, acc)


def _det_univariate_series(m, prec: int) -> list[GaussianRational]:
    n = len(m)
    ring = m[0][0].ring if n else None
    sign = 1
    det = TruncatedSeries.one(ring)
    m = [list(row) for row in m]
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                o = m[i][j].order()
                if o is not None and (best is None or o < best[0]):
                    best = (o, i, j)
                    if o == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            return [GaussianRational(0)] * prec
        v, bi, bj = best
        if bi != k:
            m[k], m[bi] = m[bi], m[k]
            sign = -sign
        if bj != k:
            for row in m:
                row[k], row[bj] = row[bj], row[k]
            sign = -sign
        pivot = m[k][k]
        det = mul(det, pivot)
        if k == n - 1 or v >= prec:
            continue
        low = ring.with_cap(prec - 1 - v)
        unit_inv = invert_unit(_shift_down(pivot, v, low))
        prow = [_shift_down(m[k][j], v, low) for j in range(k + 1, n)]
        for i in range(k + 1, n):
            a = m[i][k]
            if a.is_zero():
                continue
            q = mul(_shift_down(a, v, low), unit_inv)
            row = m[i]
            for jj, j in enumerate(range(k + 1, n)):
                if prow[jj].is_zero():
                    continue
                row[j] = row[j] - _shift_up(mul(q, prow[jj]), v, ring)
            row[k] = TruncatedSeries.zero(ring)
    if sign < 0:
        det = -det
    return [det.coeff((d,)) for d in range(prec)]
