import math

import pytest

from cmsearch import (
    CLAIM,
    MSP,
    NOCLAIM,
    NotABanditError,
    StationaryPolicy,
    amortization_check,
    brute_force_saup,
    cabinets_saup,
    compute_indices,
    is_exposed,
    maxsaup,
    threshold_bandit_policy,
)
from cmsearch.generators import random_bandit, random_msp
from cmsearch.rng import make_rng
from cmsearch.saup import best_action_bandit, enumerate_saup, policy_saup_value

from conftest import box_msp, cab, dist, two_actions, two_stage


def test_box_index():
    t = compute_indices(box_msp())
    assert t.sigma_start == pytest.approx(0.8)
    assert t.kappa_start.approx_equal(dist((0.0, 0.5), (0.8, 0.5)))


def test_two_stage_index():
    t = compute_indices(two_stage())
    assert t.sigma_start == pytest.approx(0.6)
    assert t.sigma[2] == pytest.approx(0.8)
    assert t.kappa_start.approx_equal(dist((0.0, 0.75), (0.6, 0.25)))


def test_sink_index():
    t = compute_indices(MSP.sink(7.0))
    assert t.sigma_start == 7.0
    assert t.kappa_start.support == [(7.0, 1.0)]


def test_indices_need_bandit():
    with pytest.raises(NotABanditError):
        compute_indices(two_actions())


def test_exposure_examples():
    b = two_stage()
    assert not is_exposed(b, StationaryPolicy.advance_and_claim(b))
    pi = StationaryPolicy.of([0, CLAIM, NOCLAIM, CLAIM, CLAIM])
    assert is_exposed(b, pi)
    lhs, rhs = amortization_check(b, pi)
    assert lhs < rhs - 1e-6
    assert amortization_check(b, StationaryPolicy.halt(b)) == (0.0, 0.0)


def test_threshold_policies():
    b = two_stage()
    assert threshold_bandit_policy(b, -1.0) == StationaryPolicy.advance_and_claim(b)
    assert threshold_bandit_policy(b, math.inf)[b.start] == NOCLAIM
    assert threshold_bandit_policy(b, 0.7)[0] == NOCLAIM


def test_threshold_policies_are_non_exposed():
    for seed in range(40):
        rng = make_rng(seed)
        b = random_bandit(rng, int(rng.integers(1, 7)))
        for tau in (0.0, 0.5, 1.0, 1.9):
            pi = threshold_bandit_policy(b, tau)
            assert not is_exposed(b, pi)
            lhs, rhs = amortization_check(b, pi)
            assert lhs == pytest.approx(rhs, abs=1e-9)


def test_cabinets_saup():
    c = cab((0.25, [0.0, 5.0]), (0.25, [0.0, 5.0]), (0.5, [10.0, 5.0]))
    r = cabinets_saup(c, 4.0)
    assert r.drawer == 0 and r.value == pytest.approx(3.0)
    assert cabinets_saup(c, 0.0).drawer == 1 or cabinets_saup(c, 0.0).value == pytest.approx(5.0)
    r = cabinets_saup(c, 100.0)
    assert r.value == 0.0 and r.drawer == 0


def test_maxsaup_examples():
    assert maxsaup(MSP.sink(5.0), 3.0).value == pytest.approx(2.0)
    r = maxsaup(two_actions(), 0.5)
    assert r.value == pytest.approx(1.1)
    assert r.policy[0] == 1
    assert maxsaup(two_actions(), 1.7).value == 0.0
    assert maxsaup(two_actions(), 1.7).policy[0] == NOCLAIM


def test_maxsaup_at_zero_on_bandit():
    b = two_stage()
    k = compute_indices(b).kappa_start
    assert maxsaup(b, 0.0).value == pytest.approx(k.mean())


def test_zero_values_never_claim():
    m = MSP.build([0, 0, 0], [[(0.1, [(1, 0.5), (2, 0.5)])], [], []])
    assert maxsaup(m, 0.0).value == 0.0
    assert brute_force_saup(m, 0.0) == 0.0


def test_maxsaup_policy_value_matches():
    for seed in range(60):
        rng = make_rng(seed)
        m = random_msp(rng, int(rng.integers(2, 7)), max_actions=2)
        for tau in (0.0, 0.3, 1.2):
            r = maxsaup(m, tau)
            assert policy_saup_value(m, r.policy, tau) == pytest.approx(r.value, abs=1e-9)


def test_maxsaup_best_action_bandit_non_exposed():
    for seed in range(60):
        rng = make_rng(100 + seed)
        m = random_msp(rng, int(rng.integers(2, 7)), max_actions=2)
        tau = float(rng.uniform(0, 2))
        r = maxsaup(m, tau)
        b = best_action_bandit(m, r)
        pi = StationaryPolicy.of([0 if d >= 0 else d for d in r.policy.decisions])
        assert not is_exposed(b, pi)


def test_brute_force_agrees_with_enumeration():
    for seed in range(30):
        rng = make_rng(200 + seed)
        m = random_msp(rng, int(rng.integers(2, 5)), max_actions=2)
        assert brute_force_saup(m, 0.4) == pytest.approx(enumerate_saup(m, 0.4), abs=1e-12)
