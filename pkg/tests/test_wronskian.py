import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import gaussians
from crembed.errors import CrembedError
from crembed.obstruction.gammas import make_spec
from crembed.obstruction.matrix import build_row0
from crembed.obstruction.operator import PQ_ALPHAS
from crembed.assoc_pde import HypersurfaceSource
from crembed.hypersurface import corpus_entry
from crembed.series import GaussianRational as G
from crembed.series import Ring, TruncatedSeries
from crembed.wronskian import (
    VectorFamily,
    bordered_vanishing_implies_zero,
    extract_dependence,
    fibre_family,
    generic_span_dims,
    normalize,
    span_dims,
)

Z = Ring(("z",), 12)
ZW = Ring(("z", "w"), 10)


def _family(ring, polys):
    return VectorFamily(tuple(TruncatedSeries.from_dict(ring, p) for p in polys))


def test_span_dimensions_of_monomials():
    fam = _family(Z, [{(0,): 1}, {(1,): 1}, {(2,): 1}, {(3,): 1}])
    assert generic_span_dims(fam, 5, seed=0).dims == (1, 2, 3, 3, 3)
    assert span_dims(_family(Z, [{(0,): 1}, {(1,): 1}]), {"z": G(2)}, 3).dims == (1, 1, 1)


def test_constants_are_annihilated_by_derivations():
    fam = _family(Z, [{(0,): 1}, {(1,): 1}])
    assert extract_dependence(fam, {"z": G(3)}) == (G(1), G(0))


def test_independent_family_has_no_dependence():
    fam = _family(Z, [{(1,): 1}, {(2,): 1}, {(3,): 1}])
    assert extract_dependence(fam, {"z": G(1, 1)}, max_level=6) is None


def test_planted_dependence_two_variables():
    third = Fraction(1, 3)
    h1 = {(1, 0): 1, (0, 2): 1}
    h2 = {(2, 1): 1, (0, 1): G(0, 1)}
    # h3 = 2/3 h1 - 1/3 h2 + 7
    h3 = {(0, 0): 7, (1, 0): 2 * third, (0, 2): 2 * third, (2, 1): -third, (0, 1): G(0, -third)}
    fam = _family(ZW, [h1, h2, h3])
    lam = extract_dependence(fam, {"z": G(2), "w": G(-1, 1)})
    assert lam == normalize((2 * third, -third, G(-1)))


BASE = [{(1, 0): 1, (0, 2): 1}, {(2, 1): 1, (0, 1): 1}, {(3, 0): 1, (1, 1): 2}]


@given(st.lists(gaussians.filter(bool), min_size=3, max_size=3), gaussians)
def test_planted_dependence_recovered(coeffs, shift):
    planted = {(0, 0): shift}
    for c, p in zip(coeffs, BASE):
        for e, v in p.items():
            planted[e] = planted.get(e, G(0)) + c * v
    fam = _family(ZW, BASE + [planted])
    lam = extract_dependence(fam, {"z": G(3, 1), "w": G(-2, 5)}, max_level=6)
    assert lam == normalize(tuple(coeffs) + (G(-1),))


def test_bordered_lemma_random_instances():
    rng = random.Random(2024)
    checked = 0
    while checked < 200:
        s = rng.randint(1, 5)
        B = [[G(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(s)] for _ in range(s)]
        zero = checked % 2 == 0
        a = [G(0)] * s if zero else [G(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(s)]
        try:
            result = bordered_vanishing_implies_zero(B, a)
        except CrembedError:
            continue
        assert result == (not any(a))
        checked += 1


def test_bordered_lemma_rejects_singular():
    with pytest.raises(CrembedError):
        bordered_vanishing_implies_zero([[1, 2], [2, 4]], [1, 0])


def test_oracle_on_certified_germ():
    spec = make_spec(1, 2, PQ_ALPHAS)
    src = HypersurfaceSource(corpus_entry("abs2_4").germ)
    sys = src.system(src.random_point(random.Random(0)), 20, 1)
    fam = fibre_family(build_row0(spec, sys), 1)
    lam = extract_dependence(fam, None, max_level=17, with_values=True)
    assert lam is not None and any(lam)


def test_exponential_stand_in():
    from math import factorial

    h = TruncatedSeries.from_dict(Z, {(k,): Fraction(1, factorial(k)) for k in range(9)})
    z = TruncatedSeries.variable(Z, "z")
    fam = VectorFamily((h, z * h, (z.scale(2) + 3) * h))
    assert extract_dependence(fam, {"z": G(1, 2)}, max_level=5) == normalize((3, 2, -1))
    stand_in = _family(Z, [{(0,): 1}, {(1,): 1}, {(0,): 1, (1,): 1, (2,): Fraction(1, 2), (3,): Fraction(1, 6)}])
    assert generic_span_dims(stand_in, 2).dims == (1, 2)


def test_bordered_identity_examples():
    assert bordered_vanishing_implies_zero([[1, 0], [0, 1]], [0, 0])
    assert not bordered_vanishing_implies_zero([[1, 0], [0, 1]], [1, 0])
