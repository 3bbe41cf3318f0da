import pytest

from crembed.assoc_pde import HypersurfaceSource
from crembed.hypersurface import corpus_entry
from crembed.prolong import (
    JetMonomial,
    JetPoly,
    enumerate_monomials,
    lie_expansion,
    multi_indices,
    multi_indices_up_to,
    phi_symbol,
    prolongation_poly,
    substitute_prolongation,
)
from crembed.series import GaussianRational, Ring, TruncatedSeries, substitute


def test_multi_index_counts():
    assert multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert len(multi_indices_up_to(3, 4)) == 3 + 6 + 10 + 15


def test_third_jet_in_one_variable():
    n = 1
    zero = (0, 0, 0)
    p = phi_symbol(1, 1, zero)
    expected = (
        JetPoly.symbol(phi_symbol(1, 1, (1, 0, 0)))
        + JetPoly.symbol(("xi", 1)) * JetPoly.symbol(phi_symbol(1, 1, (0, 1, 0)))
        + JetPoly.symbol(p) * JetPoly.symbol(phi_symbol(1, 1, (0, 0, 1)))
    )
    assert prolongation_poly((3,)) == expected
    assert prolongation_poly((2,)) == JetPoly.symbol(p)
    assert n == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_degree_bound(n):
    for beta in multi_indices_up_to(n, 5, 2):
        assert prolongation_poly(beta).degree() <= sum(beta) - 1


def test_second_lie_power():
    got = lie_expansion(1, (2,))
    w1, w2 = (1,), (2,)
    assert got == {
        (JetMonomial(), ((2,), 0)): 1,
        (JetMonomial.of(w1), ((1,), 1)): 2,
        (JetMonomial.of(w2), ((0,), 1)): 1,
        (JetMonomial.of(w1, w1), ((0,), 2)): 1,
    }


def test_monomial_enumeration_order_and_caps():
    monos = enumerate_monomials(1, 2, 4, 3)
    assert monos[0] == JetMonomial()
    assert all(m.weighted_degree <= 4 and m.plain_degree <= 3 for m in monos)
    weights = [m.weighted_degree for m in monos]
    assert weights == sorted(weights)
    assert JetMonomial.of((1,), (1,), (2,)) in monos
    assert JetMonomial.of((1,),) * JetMonomial.of((2,),) == JetMonomial.of((2,), (1,))
    assert JetMonomial.of((2,), (1,), (1,)).label() == "w_1^2*w_11"


@pytest.mark.parametrize("order", [3, 4])
def test_prolongation_matches_segre_derivatives(order):
    # along every Segre variety, Q evaluated on the graph is its order-th derivative
    src = HypersurfaceSource(corpus_entry("abs2_4").germ)
    sys = src.system(src.origin(), 9)
    q = substitute_prolongation(JetMonomial.of((order,)), sys)
    big = Ring(("z1", "t"), 11)
    t = TruncatedSeries.variable(big, "t")
    graph = substitute(
        sys.rho,
        {"z1": TruncatedSeries.variable(big, "z1"), "a1": t.scale(GaussianRational(2, 1)), "b": t.scale(GaussianRational(-1, 3))},
        ring=big,
    )
    target = Ring(big.vars, q.ring.cap)
    at_graph = substitute(
        q,
        {"z1": TruncatedSeries.variable(target, "z1"), "w": graph.truncate(target), "xi1": graph.derivative("z1").truncate(target)},
        ring=target,
    )
    assert graph.derivative("z1", order).truncate(target) == at_graph
