from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import RING, gaussians, nonzero_gaussians, series_in, units_in
from crembed.errors import AlignmentError, CapExhaustedError, NotAUnitError
from crembed.series import (
    GaussianRational,
    Ring,
    TruncatedSeries,
    det_exact,
    det_series,
    invert_unit,
    rank_exact,
    shift_polynomial,
    solve_exact,
    solve_implicit,
    substitute,
)

G = GaussianRational


# -- scalars ----------------------------------------------------------------


@given(gaussians, gaussians, gaussians)
def test_gaussian_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@given(nonzero_gaussians, gaussians)
def test_gaussian_division(a, b):
    assert (b / a) * a == b
    assert a * a.inverse() == 1


@given(gaussians)
def test_gaussian_text_round_trip(a):
    assert G.parse(str(a)) == a


def test_gaussian_normal_form():
    assert G(Fraction(2, 4), -3) == G(Fraction(1, 2), -3)
    assert hash(G(2)) == hash(G(Fraction(4, 2), 0))
    assert str(G(0, 1)) == "i"
    assert G(3) ** -2 == G(Fraction(1, 9))


# -- rings ------------------------------------------------------------------


def test_ring_caps_and_groups():
    r = Ring(("x", "y", "t"), 4, [(("x", "y"), 2)])
    assert r.allows((2, 0, 2)) and not r.allows((2, 1, 0)) and not r.allows((0, 0, 5))
    d = r.derivative(0)
    assert d.cap == 3 and d.gcaps == (1,)
    assert r.contains(d) and not d.contains(r)
    assert r.meet(Ring(("x", "y", "t"), 2)).cap == 2


def test_ring_rejects_repeated_names():
    with pytest.raises(ValueError):
        Ring(("x", "x"), 3)


def test_from_dict_strict():
    r = Ring(("x",), 2)
    with pytest.raises(CapExhaustedError):
        TruncatedSeries.from_dict(r, {(3,): 1})
    assert TruncatedSeries.from_dict(r, {(3,): 1}, strict=False).is_zero()


# -- series algebra ---------------------------------------------------------


@given(series_in(), series_in(), series_in())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == TruncatedSeries.zero(RING)


@given(series_in(), series_in())
def test_leibniz_rule(a, b):
    lhs = (a * b).derivative("x")
    rhs = a.derivative("x") * b.truncate(lhs.ring) + a.truncate(lhs.ring) * b.derivative("x")
    assert lhs == rhs


@given(units_in())
def test_inverse_of_unit(u):
    assert u * invert_unit(u) == TruncatedSeries.one(RING)


def test_non_unit_rejected():
    x = TruncatedSeries.variable(RING, "x")
    with pytest.raises(NotAUnitError):
        invert_unit(x)


def test_mismatched_rings_rejected():
    a = TruncatedSeries.variable(Ring(("x",), 3), "x")
    b = TruncatedSeries.variable(Ring(("y",), 3), "y")
    with pytest.raises(AlignmentError):
        a + b


@given(series_in(), st.lists(gaussians, min_size=3, max_size=3))
def test_shift_then_back(s, offs):
    big = Ring(RING.vars, RING.cap)
    p = TruncatedSeries.from_dict(big, s.to_dict())
    moved = shift_polynomial(p, dict(zip(big.vars, offs)))
    back = shift_polynomial(moved, {v: -o for v, o in zip(big.vars, offs)})
    assert back == p


@given(series_in(), gaussians, gaussians)
def test_evaluate_matches_shift(s, x0, y0):
    big = Ring(RING.vars, RING.cap)
    p = TruncatedSeries.from_dict(big, s.to_dict())
    moved = shift_polynomial(p, {"x": x0, "y": y0})
    assert moved.constant_term() == p.evaluate({"x": x0, "y": y0, "t": 0})


def test_substitute_composition():
    r = Ring(("s",), 6)
    s = TruncatedSeries.variable(r, "s")
    f = TruncatedSeries.from_dict(Ring(("x",), 6), {(k,): 1 for k in range(7)})  # 1/(1-x)
    g = substitute(f, {"x": s * s}, ring=r)
    assert g == TruncatedSeries.from_dict(r, {(0,): 1, (2,): 1, (4,): 1, (6,): 1})


def test_implicit_solution_of_quadratic():
    # v = t + v^2 has the Catalan generating function as solution
    r = Ring(("t", "v"), 8)
    t = TruncatedSeries.variable(r, "t")
    v = TruncatedSeries.variable(r, "v")
    sol = solve_implicit([v - t - v * v], ["v"], Ring(("t",), 8))["v"]
    catalan = [1, 1, 2, 5, 14, 42, 132, 429]
    assert [sol.coeff((k + 1,)) for k in range(7)] == catalan[:7]


# -- exact linear algebra ---------------------------------------------------


@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_matches_leibniz(rows):
    from itertools import permutations

    def sign(p):
        s = 1
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] > p[j]:
                    s = -s
        return s

    expected = sum(sign(p) * rows[0][p[0]] * rows[1][p[1]] * rows[2][p[2]] * rows[3][p[3]] for p in permutations(range(4)))
    assert det_exact(rows) == expected


@given(st.lists(st.lists(gaussians, min_size=3, max_size=3), min_size=3, max_size=3), st.lists(gaussians, min_size=3, max_size=3))
def test_solve_exact(mat, rhs):
    if det_exact(mat) == 0:
        assert rank_exact(mat) < 3
        return
    x = solve_exact(mat, rhs)
    for row, b in zip(mat, rhs):
        assert sum((a * xi for a, xi in zip(row, x)), G(0)) == b


def test_det_series_multiplicative():
    r = Ring(("x",), 6)
    x = TruncatedSeries.variable(r, "x")
    one = TruncatedSeries.one(r)
    a = [[one + x, x * x], [x, one - x]]
    b = [[one, x], [x * x * x, one + x * x]]
    ab = [[sum((a[i][k] * b[k][j] for k in range(2)), TruncatedSeries.zero(r)) for j in range(2)] for i in range(2)]
    assert det_series(ab) == det_series(a) * det_series(b)


@given(st.lists(st.lists(series_in(Ring(("x", "y"), 4), max_terms=4), min_size=3, max_size=3), min_size=3, max_size=3),
       gaussians, gaussians)
def test_det_series_commutes_with_evaluation(mat, x0, y0):
    # polynomial entries of degree <= 4 in a 3x3 determinant: compute at cap 12 so nothing is lost
    big = Ring(("x", "y"), 12)
    lifted = [[TruncatedSeries.from_dict(big, e.to_dict()) for e in row] for row in mat]
    point = {"x": x0, "y": y0}
    assert det_series(lifted).evaluate(point) == det_exact([[e.evaluate(point) for e in row] for row in lifted])
