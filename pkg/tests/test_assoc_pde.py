import random

import pytest

from crembed.assoc_pde import (
    FormalSource,
    HypersurfaceSource,
    PdeSystem,
    cramer_jet,
    derive_pde,
    integrability_residual,
    phi_jet,
    random_gaussian,
    segre_ray_residuals,
    segre_residuals,
)
from crembed.hypersurface import corpus, corpus_entry, real_to_complex
from crembed.series import GaussianRational, TruncatedSeries

ENTRIES = corpus()


def test_sphere_system_vanishes():
    sys, _ = derive_pde(real_to_complex(corpus_entry("sphere").germ, 8))
    assert all(e.is_zero() for row in sys.phi for e in row)


def test_abs2_4_leading_term():
    sys, _ = derive_pde(real_to_complex(corpus_entry("abs2_4").germ, 8))
    assert sys.phi[0][0].restrict_to_zero(["z1", "w"]).to_dict() == {(0, 0, 2): GaussianRational(0, -1)}


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_segre_family_solves_system(entry):
    src = HypersurfaceSource(entry.germ)
    sys = src.system(src.origin(), 8)
    rng = random.Random(7)
    for _ in range(5):
        params = [random_gaussian(rng) for _ in range(entry.germ.n + 1)]
        assert all(r.is_zero() for r in segre_ray_residuals(sys, params, 8).values())


def test_perturbed_system_fails_segre_check():
    src = HypersurfaceSource(corpus_entry("abs2_4").germ)
    sys = src.system(src.origin(), 6)
    bump = TruncatedSeries.from_dict(sys.ring, {(1, 0, 2): 1})
    bad = PdeSystem(1, ((sys.phi[0][0] + bump,),), sys.base_z, sys.base_w, sys.base_xi, rho=sys.rho)
    res = segre_ray_residuals(bad, [GaussianRational(1, 2), GaussianRational(3)], 6)
    assert not all(r.is_zero() for r in res.values())


@pytest.mark.parametrize("name", ["sphere", "abs2_4"])
def test_segre_graph_at_random_point(name):
    src = HypersurfaceSource(corpus_entry(name).germ)
    sys = src.system(src.random_point(random.Random(1)), 6)
    assert all(r.is_zero() for r in segre_residuals(sys, 6).values())


@pytest.mark.parametrize("name", ["quadric_n2_l1", "quadric_n2_l0"])
def test_integrability(name):
    sys, _ = derive_pde(real_to_complex(corpus_entry(name).germ, 8))
    assert integrability_residual(sys, 4).is_zero


def test_cramer_recursion_matches_jets():
    sys, _ = derive_pde(real_to_complex(corpus_entry("abs2_6").germ, 10))
    for d in ({"z1": 1}, {"xi1": 2}, {"w": 1, "xi1": 1}):
        assert phi_jet(sys, d) == cramer_jet(sys, d)


def test_formal_source_recentering_is_exact():
    sys = PdeSystem.formal(1, {(1, 1): {(1, 0, 2): 1, (0, 1, 0): GaussianRational(0, 1)}}, 4)
    src = FormalSource(sys)
    p = src.random_point(random.Random(0))
    moved = src.system(p, 4)
    d = p.as_dict()
    value = sys.phi[0][0].evaluate([d["z1"], d["w"], d["xi1"]])
    assert moved.phi[0][0].constant_term() == value
    assert moved.base_xi == (d["xi1"],)


def test_integrability_detects_incompatible_system():
    # w_11 = z2, w_12 = 0 forces w_112 = 1 and w_121 = 0
    bad = PdeSystem.formal(2, {(1, 1): {(0, 1, 0, 0, 0): 1}}, 4)
    assert not integrability_residual(bad, 3).is_zero
    # w_11 = w_2, w_12 = w_22 = 0 is compatible: w = c z1^2/2 + a z1 + c z2 + b
    ok = PdeSystem.formal(2, {(1, 1): {(0, 0, 0, 0, 1): 1}}, 4)
    assert integrability_residual(ok, 3).is_zero


def test_genuine_two_variable_germ_is_integrable():
    from crembed.hypersurface import parse_defining

    sys, _ = derive_pde(real_to_complex(parse_defining("z1*c1 + z2*c2 + z1^2*c1^2", 2), 8))
    assert integrability_residual(sys, 4).is_zero


def test_sphere_inverse_map():
    _, inv = derive_pde(real_to_complex(corpus_entry("sphere").germ, 6))
    assert str(inv.A[0]) == "-1/2*i*xi1"
    assert str(inv.B) == "w - z1*xi1"
    assert inv.A[0].derivative("w").is_zero() and str(inv.B.derivative("w")) == "1"
