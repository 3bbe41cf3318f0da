from math import comb

import pytest
from hypothesis import given, strategies as st

from crembed.bounds import (
    bound_report,
    bound_table,
    count_multiindices,
    mu_of,
    nu_of,
    p_of,
    s_bound,
    weighted_cap,
)
from crembed.prolong import multi_indices


def test_known_values():
    assert p_of(2, 1) == 3 and p_of(2, 2) == 5
    assert s_bound(2, 1) == 84
    assert nu_of(1, 2) == 87 and nu_of(1, 1) == 12
    assert weighted_cap(2) == 6


def test_sharp_annotation():
    r = bound_report(1, 2)
    assert r.sharp == {"phi_order": 16, "mu": 18}
    assert r.to_json()["sharp"]["mu"] == 18
    assert "sharp" not in bound_report(1, 1).to_json()


@pytest.mark.parametrize("n", range(1, 9))
def test_nu_monotone_and_mu(n):
    values = [nu_of(n, m) for m in range(n, 9)]
    assert values == sorted(values)
    for N in range(n, 9):
        assert mu_of(n, N) == nu_of(n, N)


@given(st.integers(0, 8), st.integers(1, 4))
def test_multiindex_count(l, n):
    assert count_multiindices(l, n) == (len(multi_indices(n, l)) if l else 1)


def test_jet_variable_count():
    # p counts xi_j and the second-order jets of each of the C(m, n) targets
    for n in range(1, 4):
        for m in range(n, 5):
            assert p_of(m, n) == n + count_multiindices(2, n) * comb(m, n)


def test_invalid_pairs():
    with pytest.raises(ValueError):
        nu_of(2, 1)
    with pytest.raises(ValueError):
        bound_table(3, 2)
