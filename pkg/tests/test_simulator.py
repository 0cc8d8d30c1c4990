import math

import numpy as np
import pytest

from bmnc import simulator as sim
from bmnc.analysis import exact_system_sep, exact_user_sep, sep_no_nc, error_terms, _xor_probability
from bmnc.channel import ladder_profile
from bmnc.matrix import EncodingMatrix, design
from bmnc.simulator import SimConfig, DecompositionViolation, block_rng, run_round_nc, run_round_no_nc, simulate


def test_config_validation():
    p = ladder_profile(3, 10.0)
    with pytest.raises(ValueError):
        SimConfig(p, design(3), 0, 1)
    with pytest.raises(ValueError):
        SimConfig(p, design(3), 10, 1, workers=0)
    with pytest.raises(ValueError):
        SimConfig(p, design(4), 10, 1)


def test_slots_and_scheme():
    p = ladder_profile(4, 10.0)
    assert SimConfig(p, design(4), 1, 1).slots_per_round == 7
    assert SimConfig(p, None, 1, 1).slots_per_round == 8
    assert SimConfig(p, None, 1, 1).scheme == "no-nc"


def test_single_round_tables():
    p = ladder_profile(4, 60.0)
    rng = block_rng(3, 0)
    t = run_round_nc(design(4), p, rng)
    assert t.shape == (4, 3) and t.all()
    u = run_round_no_nc(p, rng)
    assert u.shape == (4, 4) and u.all()


def test_high_snr_no_errors():
    r = simulate(SimConfig(ladder_profile(4, 80.0), design(4), 5000, 1, debug=True))
    assert r.sep_estimate == 0.0
    assert r.throughput_estimate == pytest.approx(12 / 7)


def test_fixed_seed_reproducible():
    cfg = SimConfig(ladder_profile(4, 10.0), design(4), 40000, 99)
    a, b = simulate(cfg), simulate(cfg)
    assert a.sep_estimate == b.sep_estimate
    assert np.array_equal(a.errors, b.errors)


@pytest.mark.parametrize("workers", [2, 3, 5])
def test_worker_count_does_not_change_result(workers):
    p = ladder_profile(4, 5.0)
    base = simulate(SimConfig(p, design(4), 70000, 4))
    par = simulate(SimConfig(p, design(4), 70000, 4, workers=workers))
    assert np.array_equal(base.errors, par.errors)
    nonc = [simulate(SimConfig(p, None, 70000, 4, workers=w)).errors for w in (1, workers)]
    assert np.array_equal(*nonc)


def test_different_seeds_differ():
    p = ladder_profile(3, 5.0)
    a = simulate(SimConfig(p, design(3), 20000, 1))
    b = simulate(SimConfig(p, design(3), 20000, 2))
    assert not np.array_equal(a.errors, b.errors)


def test_stderr_is_binomial_and_positive():
    r = simulate(SimConfig(ladder_profile(3, 10.0), design(3), 30000, 5))
    n = 3 * 2 * 30000
    assert r.sep_stderr == pytest.approx(math.sqrt(r.sep_estimate * (1 - r.sep_estimate) / n))
    assert r.sep_stderr > 0
    assert r.throughput_stderr == pytest.approx(6 / 5 * r.sep_stderr)


def test_throughput_counts_slots():
    r = simulate(SimConfig(ladder_profile(3, 10.0), None, 30000, 5))
    assert r.throughput_estimate == pytest.approx((1 - r.sep_estimate) * 6 / 6)


def test_debug_mode_checks_every_round():
    for rows in ([[1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]], [[0, 1, 0, 1], [1, 0, 1, 0], [0, 0, 1, 1]]):
        r = simulate(SimConfig(ladder_profile(4, 0.0), EncodingMatrix(np.array(rows)), 50000, 8, debug=True))
        assert r.decomposition_mismatches == 0


def test_violation_is_raised(monkeypatch):
    real = sim._nc_rounds

    def broken(*args):
        errors, _ = real(*args)
        return errors, 1

    monkeypatch.setattr(sim, "_nc_rounds", broken)
    with pytest.raises(DecompositionViolation):
        simulate(SimConfig(ladder_profile(3, 10.0), design(3), 100, 1, debug=True))
    with pytest.raises(DecompositionViolation):
        run_round_nc(design(3), ladder_profile(3, 10.0), block_rng(1, 0))


def test_three_users_converge_to_exact():
    p = ladder_profile(3, 10.0)
    r = simulate(SimConfig(p, design(3), 10**6, 17))
    assert abs(r.sep_estimate - exact_system_sep(design(3), p)) <= 3 * r.sep_stderr_batch


def test_per_symbol_rates_match_closed_form():
    # each (user, symbol) count is a plain binomial, so the binomial stderr applies
    p = ladder_profile(4, 10.0)
    f = design(4)
    rounds = 300000
    r = simulate(SimConfig(p, f, rounds, 23))
    for i in range(1, 5):
        t = error_terms(f, i, p)
        for k in range(3):
            q = _xor_probability(t[:, k])
            se = math.sqrt(q * (1 - q) / rounds)
            assert abs(r.errors[i - 1, k] / rounds - q) <= 4 * se


def test_per_user_sums():
    p = ladder_profile(4, 15.0)
    r = simulate(SimConfig(p, design(4), 200000, 31))
    for i in range(1, 5):
        est = r.errors[i - 1].sum() / 200000
        assert est == pytest.approx(exact_user_sep(design(4), i, p), rel=0.05)


def test_no_nc_matches_pairwise_exact():
    p = ladder_profile(4, 10.0)
    r = simulate(SimConfig(p, None, 300000, 3))
    truth = sep_no_nc(4, p, pairwise_exact=True)
    assert abs(r.sep_estimate - truth) <= 3 * r.sep_stderr_batch


def test_batch_stderr_exceeds_binomial_for_coded_scheme():
    r = simulate(SimConfig(ladder_profile(4, 10.0), design(4), 200000, 2))
    assert r.sep_stderr_batch > r.sep_stderr


def test_single_block_has_no_batch_stderr():
    r = simulate(SimConfig(ladder_profile(3, 10.0), design(3), 100, 2))
    assert math.isnan(r.sep_stderr_batch)
