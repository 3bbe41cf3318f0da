import pytest

from crembed.errors import LeviDegenerateError, NormalizationError, RealityError
from crembed.hypersurface import (
    EmbeddingCertificate,
    corpus,
    corpus_entry,
    levi_determinant,
    parse_defining,
    phi_from_rho,
    random_germ,
    real_to_complex,
    reality_residual,
    require_levi_nondegenerate,
    rho_b_identity_residual,
    verify_certificate,
)
from crembed.series import GaussianRational, Ring, TruncatedSeries

ENTRIES = corpus()


def test_parse_rejects_non_real():
    with pytest.raises(RealityError):
        parse_defining("z1*c1 + i*z1^2*c1", 1)


def test_parse_rejects_linear_part():
    with pytest.raises(NormalizationError):
        parse_defining("z1 + z1*c1", 1)


def test_sphere_rho_and_levi():
    r = real_to_complex(corpus_entry("sphere").germ, 6)
    assert str(r.rho) == "b + 2*i*z1*a1"
    assert levi_determinant(r) == GaussianRational(0, 2)


def test_levi_flat_rejected():
    h = parse_defining("u^2", 1)
    with pytest.raises(LeviDegenerateError):
        require_levi_nondegenerate(real_to_complex(h, 4))


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_rho_reality(entry):
    r = real_to_complex(entry.germ, 8)
    assert reality_residual(r).is_zero()


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_phi_round_trip(entry):
    r = real_to_complex(entry.germ, 10)
    assert phi_from_rho(r, 10) == entry.germ.phi_at(10)


@pytest.mark.parametrize("entry", ENTRIES, ids=lambda e: e.name)
def test_rho_b_identity(entry):
    r = real_to_complex(entry.germ, 7)
    assert rho_b_identity_residual(entry.germ, r, 6).is_zero()


@pytest.mark.parametrize("entry", [e for e in ENTRIES if e.certificate], ids=lambda e: e.name)
def test_certificates(entry):
    assert verify_certificate(entry.germ, entry.certificate, 10)


def test_wrong_certificate_fails():
    e = corpus_entry("abs2_4")
    ring = Ring(("z1", "w"), 3)
    bad = EmbeddingCertificate(
        2,
        0,
        (
            TruncatedSeries.from_dict(ring, {(1, 0): 1}),
            TruncatedSeries.from_dict(ring, {(3, 0): 1}),
            TruncatedSeries.from_dict(ring, {(0, 1): 1}),
        ),
    )
    assert not verify_certificate(e.germ, bad, 6)


def test_random_germ_is_seeded_and_real():
    a = random_germ(1, 5, seed=3)
    b = random_germ(1, 5, seed=3)
    assert a.phi == b.phi and a.name == b.name
    assert random_germ(1, 5, seed=4).phi != a.phi
