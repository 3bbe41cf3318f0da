import json
import random

import pytest

from crembed.assoc_pde import FormalSource, HypersurfaceSource, PdeSystem
from crembed.errors import GammaSearchError, GammaTableError, SpecError
from crembed.hypersurface import corpus, corpus_entry
from crembed.obstruction import gammas as gm
from crembed.obstruction.matrix import (
    build_matrix,
    build_row0,
    caps_for,
    determinant_at_point,
    determinant_series,
    line_directions,
    pq_row0_direct,
)
from crembed.obstruction.operator import (
    PQ_ALPHAS,
    ObstructionSpec,
    default_basis,
    determinant_support,
    enumerate_alpha_choices,
    pq_basis,
    wronskian_gammas,
)
from crembed.prolong import JetMonomial
from crembed.series import GaussianRational


def test_alpha_choice_counts():
    # n = 1: distinctness forces alpha^i = (i)
    assert enumerate_alpha_choices(1, 3) == [((1,), (2,), (3,), (4,))]
    # n = 2, m = 2: the third row is any order <= 2 index except the units
    assert len(enumerate_alpha_choices(2, 2)) == 3
    # n = 2, m = 3: 3 choices for the third row, then 9 - 3 for the fourth
    assert len(enumerate_alpha_choices(2, 3)) == 18
    for alphas in enumerate_alpha_choices(2, 3):
        assert len(set(alphas)) == len(alphas)


@pytest.mark.parametrize("alphas, size", [(((1,), (2,)), 5), (PQ_ALPHAS, 16), (((1,), (2,), (3,), (4,)), 56)])
def test_support_sizes(alphas, size):
    assert len(determinant_support(1, alphas)) == size


def test_pq_basis_is_the_support():
    assert set(pq_basis()) == set(determinant_support(1, PQ_ALPHAS))
    kind, basis = default_basis(1, PQ_ALPHAS)
    assert kind == "pq" and basis == pq_basis()


def test_support_of_two_variable_operators():
    sizes = sorted(len(default_basis(2, a)[1]) for a in enumerate_alpha_choices(2, 2))
    assert set(sizes) <= {8, 9}


def test_spec_validation():
    basis = tuple(pq_basis())
    good = ObstructionSpec(1, 2, PQ_ALPHAS, wronskian_gammas(15), basis)
    assert good.s == 15 and good.k == 2 and good.d == 6 and good.operator_order == 16
    with pytest.raises(SpecError):
        ObstructionSpec(1, 2, ((1,), (2,), (4,)), wronskian_gammas(15), basis)
    with pytest.raises(SpecError):
        ObstructionSpec(1, 2, PQ_ALPHAS, ((1,),) * 15, basis)
    with pytest.raises(SpecError):
        ObstructionSpec(1, 2, PQ_ALPHAS, ((2,),) + wronskian_gammas(15)[1:], basis)
    with pytest.raises(SpecError):
        ObstructionSpec(1, 1, ((1,), (2,)), (), (JetMonomial.of((3,)),))


@pytest.mark.parametrize("entry", [e for e in corpus() if e.germ.n == 1], ids=lambda e: e.name)
def test_hand_coded_matrix_agrees(entry):
    spec = gm.make_spec(1, 2, PQ_ALPHAS)
    cap, jet = caps_for(spec)
    src = HypersurfaceSource(entry.germ)
    sys = src.system(src.origin(), cap, jet)
    assert build_matrix(spec, sys).rows == build_matrix(spec, sys, pq_row0_direct(sys)).rows


def test_line_directions_unisolvent_count():
    from math import comb

    assert len(line_directions(3, 4)) == comb(4 + 2, 2)


def test_sphere_operator_vanishes_and_bump_does_not():
    spec = gm.make_spec(1, 1, ((1,), (2,)))
    src = HypersurfaceSource(corpus_entry("sphere").germ)
    cap, jet = caps_for(spec, 3)
    sys = src.system(src.origin(), cap, jet)
    assert determinant_series(spec, sys, 3).vanishes
    src = HypersurfaceSource(corpus_entry("abs2_4").germ)
    p = src.random_point(random.Random(0))
    assert determinant_at_point(spec, src.system(p, *caps_for(spec))) != 0


# -- derivative rows --------------------------------------------------------


def test_table_is_consistent_with_search():
    table = gm.load_table()
    assert table["version"] == gm.TABLE_VERSION
    for alphas in enumerate_alpha_choices(2, 2):
        kind, basis = default_basis(2, alphas)
        assert gm.table_entry(2, 2, alphas, kind, basis) == gm.search_gammas(2, 2, alphas, basis, seed=table["seed"])


def test_search_fails_on_a_degenerate_trial():
    # with Phi = 0 every row-0 function is a polynomial in xi of low degree
    alphas = enumerate_alpha_choices(2, 2)[0]
    kind, basis = default_basis(2, alphas)
    flat = PdeSystem.formal(2, {}, 8, 1, base_xi=[GaussianRational(1), GaussianRational(2)])
    with pytest.raises(GammaSearchError) as info:
        gm.search_gammas(2, 2, alphas, basis, trial=flat, budget=1)
    assert info.value.best_rank < len(basis)


def test_make_spec_sources():
    assert gm.make_spec(1, 2, PQ_ALPHAS).meta["gamma_source"] == "table"
    spec = gm.make_spec(1, 4, ((1,), (2,), (3,), (4,), (5,)), search=True)
    assert spec.gammas == wronskian_gammas(spec.s)


def test_missing_entry_without_search():
    with pytest.raises(GammaTableError):
        gm.make_spec(1, 4, ((1,), (2,), (3,), (4,), (5,)), search=False)


def _with_table(monkeypatch, tmp_path, data):
    path = tmp_path / "table.json"
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    monkeypatch.setenv("CREMBED_GAMMA_TABLE", str(path))
    return path


def test_corrupted_table_rejected(monkeypatch, tmp_path):
    _with_table(monkeypatch, tmp_path, "{not json")
    with pytest.raises(GammaTableError):
        gm.make_spec(1, 2, PQ_ALPHAS)


def test_wrong_version_rejected(monkeypatch, tmp_path):
    data = dict(gm.load_table())
    data["version"] = "0"
    _with_table(monkeypatch, tmp_path, data)
    with pytest.raises(GammaTableError):
        gm.make_spec(1, 2, PQ_ALPHAS)


def test_invalid_rows_rejected(monkeypatch, tmp_path):
    data = json.loads(json.dumps(gm.load_table()))
    key = next(iter(data["entries"]))
    data["entries"][key]["gammas"][0] = [5] * len(data["entries"][key]["gammas"][0])
    _with_table(monkeypatch, tmp_path, data)
    with pytest.raises(GammaTableError):
        gm.load_table()


def test_missing_table(monkeypatch, tmp_path):
    monkeypatch.setenv("CREMBED_GAMMA_TABLE", str(tmp_path / "absent.json"))
    with pytest.raises(GammaTableError):
        gm.load_table()
