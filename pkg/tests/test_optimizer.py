import numpy as np
import pytest

from bmnc.analysis import sep_upper_bound
from bmnc.channel import SnrProfile, db_to_linear, ladder_profile, uniform_profile
from bmnc.matrix import EncodingMatrix, design, enumerate_valid
from bmnc.optimizer import (
    bound_gap,
    check_orderings,
    search_optimal,
    verify_lemma5_orderings,
    verify_three_user_orderings,
)

MATRIX_1 = EncodingMatrix(np.array([[0, 0, 1, 1], [0, 1, 0, 1], [1, 0, 0, 1]]))


@pytest.mark.parametrize("n,count", [(3, 6), (4, 168), (5, 20160)])
@pytest.mark.parametrize("esn0", [0.0, 10.0, 20.0, 30.0])
def test_design_is_unique_bound_minimiser(n, count, esn0):
    p = ladder_profile(n, esn0)
    res = search_optimal(n, p)
    assert res.candidates_examined == count
    assert res.best_matrices == [design(n)]
    assert res.profile_orderings_ok
    assert res.best_bound == pytest.approx(sep_upper_bound(design(n), p), rel=1e-13)


def test_three_user_minimiser_matrix():
    res = search_optimal(3, ladder_profile(3, 10.0))
    assert res.best_matrices[0].f.tolist() == [[1, 1, 0], [1, 0, 1]]


def test_search_bound_matches_analysis_for_every_candidate():
    p = ladder_profile(4, 7.0)
    res = search_optimal(4, p)
    assert res.best_bound == pytest.approx(min(sep_upper_bound(f, p) for f in enumerate_valid(4)), rel=1e-13)


def test_uniform_profile_reports_ties():
    res = search_optimal(4, uniform_profile(4, 10.0))
    assert design(4) in res.best_matrices
    assert len(res.best_matrices) > 1
    assert not res.profile_orderings_ok


def test_exact_objective_reports_disagreement():
    low = search_optimal(3, ladder_profile(3, 0.0), objective="exact")
    assert low.objective == "exact"
    assert low.bound_argmin == [design(3)]
    assert not low.objectives_agree
    high = search_optimal(3, ladder_profile(3, 20.0), objective="exact")
    assert high.best_matrices == [design(3)]
    assert high.objectives_agree


def test_search_errors():
    with pytest.raises(ValueError):
        search_optimal(7, ladder_profile(7, 0.0))
    with pytest.raises(ValueError):
        search_optimal(3, ladder_profile(4, 0.0))
    with pytest.raises(ValueError):
        search_optimal(3, ladder_profile(3, 0.0), objective="median")


def test_check_orderings():
    assert check_orderings(ladder_profile(5, 10.0))
    p = ladder_profile(4, 10.0)
    assert not check_orderings(SnrProfile(p.uplink[::-1].copy(), p.downlink))
    assert not check_orderings(SnrProfile(p.uplink, p.downlink[:, ::-1].copy()))


def test_three_user_exact_ladder_has_a_tie():
    # With 3 dB between both users and slots, e22 + e32 equals e11 + e21, so the
    # strict chain cannot hold.
    p = ladder_profile(3, 10.0)
    assert not verify_three_user_orderings(p)


@pytest.mark.parametrize("step", [3.5, 4.0, 6.0])
@pytest.mark.parametrize("esn0", [0.0, 10.0, 20.0, 30.0])
def test_three_user_strict_ladders(step, esn0):
    p = ladder_profile(3, esn0, user_step_db=step)
    assert verify_three_user_orderings(p)
    assert search_optimal(3, p).best_matrices == [design(3)]


def test_three_user_minimiser_whenever_orderings_hold():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(400):
        up = np.sort(db_to_linear(rng.uniform(0, 30, 3)))
        down = db_to_linear(rng.uniform(0, 30, (3, 2)))
        p = SnrProfile(up, down)
        if verify_three_user_orderings(p):
            hits += 1
            assert search_optimal(3, p).best_matrices == [design(3)]
    assert hits > 0


def test_three_user_false_cases():
    p = ladder_profile(3, 10.0, user_step_db=4.0)
    inverted = SnrProfile(p.uplink, p.downlink[:, ::-1].copy())
    assert not verify_three_user_orderings(inverted)
    assert not verify_three_user_orderings(uniform_profile(3, 10.0))
    with pytest.raises(ValueError):
        verify_three_user_orderings(ladder_profile(4, 0.0))


def test_bound_gap_examples():
    p = ladder_profile(4, 10.0)
    assert bound_gap(design(4), p) == 0.0
    assert bound_gap(MATRIX_1, p) > 0


@pytest.mark.parametrize("esn0", [0.0, 10.0, 20.0, 30.0])
def test_bound_gap_nonnegative_everywhere(esn0):
    p = ladder_profile(4, esn0)
    gaps = [bound_gap(f, p) for f in enumerate_valid(4)]
    assert min(gaps) >= 0
    assert sum(g == 0 for g in gaps) == 1


def test_bound_gap_is_scaled_bound_difference():
    p = ladder_profile(4, 5.0)
    diff = sep_upper_bound(MATRIX_1, p, normalized=False) - sep_upper_bound(design(4), p, normalized=False)
    assert bound_gap(MATRIX_1, p) == pytest.approx(4 * diff)


def test_best_bound_improves_with_downlink():
    p = ladder_profile(4, 10.0)
    better = SnrProfile(p.uplink, p.downlink * 2)
    assert search_optimal(4, better).best_bound <= search_optimal(4, p).best_bound


def test_interface_alias():
    assert verify_lemma5_orderings is verify_three_user_orderings
