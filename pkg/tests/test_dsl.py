import pytest
from hypothesis import given, strategies as st

from crembed.dsl import parse_polynomial, split_source
from crembed.errors import DSLSyntaxError
from crembed.series import GaussianRational

VARS = ("z1", "c1", "u")


def test_basic_polynomial():
    p = parse_polynomial("z1*c1 + (1/2 - 3*i)*u^2 - z1^2", VARS)
    assert p == {(1, 1, 0): 1, (0, 0, 2): GaussianRational("1/2", -3), (2, 0, 0): -1}


def test_unary_minus_binds_looser_than_power():
    assert parse_polynomial("-u^2", VARS) == {(0, 0, 2): -1}
    assert parse_polynomial("(-u)^3", VARS) == {(0, 0, 3): -1}


def test_cancellation_drops_terms():
    assert parse_polynomial("z1*c1 - c1*z1", VARS) == {}


@pytest.mark.parametrize(
    "text, pos",
    [
        ("z1*c1 +", 7),
        ("z1*c1 + x", 8),
        ("z1 c1", 3),
        ("z1*c1^", 6),
        ("2/0*u", 2),
        ("(z1*c1", 6),
        ("z1 $ c1", 3),
    ],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(DSLSyntaxError) as info:
        parse_polynomial(text, VARS)
    assert info.value.position == pos
    assert "^" in str(info.value)


def test_power_limit():
    with pytest.raises(DSLSyntaxError):
        parse_polynomial("u^99", VARS, max_power=10)


def test_comments_and_name():
    src = split_source("# name: bump\n# another comment\nz1*c1\n + z1^2*c1^2\n")
    assert src.name == "bump"
    assert parse_polynomial(src.body, VARS) == {(1, 1, 0): 1, (2, 2, 0): 1}


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)), st.integers(-9, 9), max_size=6))
def test_printed_polynomial_parses_back(coeffs):
    from crembed.series import Ring, TruncatedSeries

    ring = Ring(VARS, 9)
    s = TruncatedSeries.from_dict(ring, coeffs)
    text = str(s)
    assert TruncatedSeries.from_dict(ring, parse_polynomial(text, VARS)) == s
