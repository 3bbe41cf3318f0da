import json
import random

import pytest

from crembed.assoc_pde import FormalSource, HypersurfaceSource, PdeSystem, SamplePoint
from crembed.errors import LeviDegenerateError
from crembed.hypersurface import corpus_entry, parse_defining, random_germ
from crembed.obstruction.gammas import make_spec
from crembed.obstruction.matrix import build_matrix, caps_for, determinant_at_point, determinant_series
from crembed.obstruction.operator import PQ_ALPHAS
from crembed.obstruction.pipeline import (
    INCONCLUSIVE,
    NONZERO,
    OBSTRUCTED,
    SATISFIED,
    UNDETERMINED,
    VANISHING,
    DeterminantData,
    SeriesVanishing,
    aggregate,
    det_operator,
    full_pipeline,
    sample_points,
    unique_alpha_sets,
)
from crembed.series import GaussianRational as G
from crembed.series import det_series

PQ = make_spec(1, 2, PQ_ALPHAS)
ONE_ONE = make_spec(1, 1, ((1,), (2,)))


def _factor(values, series=None):
    return DeterminantData(ONE_ONE, [G(v) for v in values], series)


def test_factor_status():
    assert _factor([0, 0, 3]).status == NONZERO
    assert _factor([0, 0]).status == VANISHING
    assert _factor([]).status == UNDETERMINED
    assert _factor([0], SeriesVanishing(4, False, 2, 15)).status == NONZERO
    assert _factor([], SeriesVanishing(4, True, None, 15)).status == VANISHING


def test_aggregate():
    assert aggregate([_factor([1]), _factor([0, 2])]) == OBSTRUCTED
    assert aggregate([_factor([1]), _factor([0, 0])]) == SATISFIED
    assert aggregate([_factor([1]), _factor([])]) == INCONCLUSIVE
    assert aggregate([]) == INCONCLUSIVE


def test_unique_alpha_sets_merge_permutations():
    assert len(unique_alpha_sets(2, 3)) == 15
    assert unique_alpha_sets(1, 2) == [PQ_ALPHAS]


@pytest.mark.parametrize("name", ["sphere", "abs2_4", "quadric_n2_l1"])
def test_certified_germs_are_not_obstructed(name):
    v = full_pipeline(corpus_entry(name).germ, 2, order=3, samples=4, seed=1)
    assert v.conclusion == SATISFIED


def test_random_germ_obstructed_for_small_target():
    v = full_pipeline(corpus_entry("abs2_4").germ, 1, order=2, samples=2, seed=0)
    assert v.conclusion == OBSTRUCTED
    assert v.factors[0].status == NONZERO


def test_levi_degenerate_germ_rejected():
    with pytest.raises(LeviDegenerateError):
        full_pipeline(parse_defining("u^2 + z1^2*c1^2", 1), 2, samples=1)


def test_verdict_json_is_deterministic():
    h = corpus_entry("abs2_4").germ
    a = full_pipeline(h, 2, order=2, samples=3, seed=5).to_json()
    b = full_pipeline(h, 2, order=2, samples=3, seed=5).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["conclusion"] == SATISFIED and a["sample_height"] == 97
    assert "seconds" not in a


def _cubic_system(seed: int, cap: int, jet: int) -> PdeSystem:
    rng = random.Random(seed)
    coeffs = {}
    for a in range(3):
        for b in range(3 - a):
            for d in range(4):
                c = rng.randint(-5, 5)
                if c:
                    coeffs[(a, b, d)] = G(c, rng.randint(-5, 5))
    return PdeSystem.formal(1, {(1, 1): coeffs}, cap, jet)


@pytest.mark.parametrize("seed", range(3))
def test_cubic_in_xi_rows_vanish(seed):
    cap, jet = caps_for(PQ)
    sys = _cubic_system(seed, cap, jet)
    rows = build_matrix(PQ, sys).rows
    assert all(e.is_zero() for row in rows[8:] for e in row)
    src = FormalSource(sys)
    for p in sample_points(src, 3, seed):
        assert determinant_at_point(PQ, src.system(p, cap, jet)) == 0


def test_shift_invariance_of_recentering():
    cap, jet = caps_for(ONE_ONE)
    sys = _cubic_system(9, cap + 2, jet + 2)
    p1 = (G(1, 2), G(-3), G(0, 1))
    p2 = (G(2), G(1, 1), G(-1, 4))
    two_step = sys.recentered([p1[0]], p1[1], [p1[2]]).recentered([p2[0]], p2[1], [p2[2]], cap, jet)
    one_step = sys.recentered([p1[0] + p2[0]], p1[1] + p2[1], [p1[2] + p2[2]], cap, jet)
    assert two_step == one_step
    assert determinant_at_point(ONE_ONE, two_step) == determinant_at_point(ONE_ONE, one_step)


def test_point_and_series_modes_agree():
    order = 10
    cap, jet = caps_for(ONE_ONE, order)
    sys = PdeSystem.formal(1, {(1, 1): {(0, 0, 2): G(1, 1), (0, 0, 5): G(-2), (1, 0, 4): G(1)}}, cap, jet)
    expansion = det_series(build_matrix(ONE_ONE, sys).rows)
    src = FormalSource(sys)
    c0, j0 = caps_for(ONE_ONE)
    for x in (G(3, -2), G(0, 1), G(-5)):
        p = SamplePoint("formal", (("z1", G(0)), ("w", G(0)), ("xi1", x)))
        assert determinant_at_point(ONE_ONE, src.system(p, c0, j0)) == expansion.evaluate([0, 0, x])
    vanishing = determinant_series(ONE_ONE, sys, 4)
    assert not vanishing.vanishes and vanishing.first_nonzero == expansion.order()


def test_det_operator_reports_points_and_series():
    src = HypersurfaceSource(random_germ(1, 4, seed=2))
    pts = sample_points(src, 2, 0)
    data = det_operator(ONE_ONE, src, pts, order=2)
    assert len(data.values) == 2 and data.series is not None
    assert data.status == NONZERO
