import numpy as np
import pytest

from cmsearch import (
    CLAIM,
    MSP,
    NOCLAIM,
    DiscreteDistribution,
    InvalidInstanceError,
    StationaryPolicy,
    claim_probability,
    expected_performance,
    induced_bandit,
    is_bandit,
    simulate_policy,
    tree_msp,
    validate_msp,
)
from cmsearch._config import PolicyMismatchError
from cmsearch.generators import random_msp
from cmsearch.model import Cabinet, enumerate_policies, tree_origin

from conftest import box_msp, two_actions, two_stage


def test_validate_examples():
    assert validate_msp(MSP.sink(3.0)) == []
    bad = MSP.build([0, 0, 1], [[(0.1, [(1, 0.5), (2, 0.4)])], [], []])
    assert any("sum" in v for v in validate_msp(bad))
    cyc = MSP.build([0, 0], [[(0.1, [(1, 1.0)])], [(0.1, [(0, 1.0)])]])
    assert any("cycle" in v.lower() or "dag" in v.lower() for v in validate_msp(cyc))


def test_validate_flags_nonpositive_cost_and_nonsink_value():
    m = MSP.build([1.0, 0, 1], [[(0.0, [(1, 0.5), (2, 0.5)])], [], []])
    assert len(validate_msp(m)) >= 2


def test_is_bandit():
    assert is_bandit(box_msp())
    assert is_bandit(MSP.sink(1.0))
    assert not is_bandit(two_actions())


def test_distribution_basics():
    d = DiscreteDistribution.from_pairs([(3.0, 0.5), (1.0, 0.25), (1.0, 0.25)])
    assert d.support == [(1.0, 0.5), (3.0, 0.5)]
    assert d.mean() == pytest.approx(2.0)
    assert d.expected_excess(2.0) == pytest.approx(0.5)
    assert d.prob_at_least(3.0) == pytest.approx(0.5)
    assert d.prob_at_least(3.0, strict=True) == 0.0
    assert d.capped(2.0).mean() == pytest.approx(1.5)
    with pytest.raises(ValueError):
        DiscreteDistribution.from_pairs([(1.0, 0.4)])


def test_performance_examples():
    s = MSP.sink(5.0)
    assert expected_performance(s, StationaryPolicy.of([CLAIM])) == 5.0
    assert expected_performance(s, StationaryPolicy.of([NOCLAIM])) == 0.0
    m = box_msp()
    assert expected_performance(m, StationaryPolicy.of([0, CLAIM, CLAIM])) == pytest.approx(0.4)
    assert expected_performance(m, StationaryPolicy.of([0, NOCLAIM, CLAIM])) == pytest.approx(0.4)
    assert claim_probability(m, StationaryPolicy.of([0, NOCLAIM, CLAIM])) == pytest.approx(0.5)


def test_policy_check():
    with pytest.raises(PolicyMismatchError):
        StationaryPolicy.of([0]).check(box_msp())
    with pytest.raises(PolicyMismatchError):
        StationaryPolicy.of([3, CLAIM, CLAIM]).check(box_msp())


def test_simulation_matches_expectation():
    m = two_stage()
    pi = StationaryPolicy.advance_and_claim(m)
    perf = [simulate_policy(m, pi, seed)[1] for seed in range(4000)]
    assert np.mean(perf) == pytest.approx(expected_performance(m, pi), abs=4 * np.std(perf) / np.sqrt(4000))
    tr, _ = simulate_policy(m, pi, 0)
    assert tr.is_valid(m)


def test_simulation_deterministic():
    m = two_stage()
    pi = StationaryPolicy.advance_and_claim(m)
    assert simulate_policy(m, pi, 11) == simulate_policy(m, pi, 11)


def test_tree_of_tree_is_isomorphic():
    t = tree_msp(box_msp())
    assert t.n_states == 3
    assert sorted(t.values) == [0, 0, 1]


def test_diamond_is_split():
    # s0 -> {s1, s2} -> s3 shared
    m = MSP.build([0, 0, 0, 1], [[(0.1, [(1, 0.5), (2, 0.5)])], [(0.1, [(3, 1.0)])], [(0.1, [(3, 1.0)])], []])
    t = tree_msp(m)
    assert tree_origin(t).count(3) == 2


def test_shared_middle_layer_count():
    # two actions out of s0 into the same three middle states
    acts = [[(0.1, [(1, 1 / 3), (2, 1 / 3), (3, 1 / 3)]), (0.2, [(1, 1 / 3), (2, 1 / 3), (3, 1 - 2 / 3)])]]
    acts += [[(0.1, [(4, 1.0)])] for _ in range(3)] + [[]]
    t = tree_msp(MSP.build([0, 0, 0, 0, 1], acts))
    assert sum(1 for o in tree_origin(t) if o in (1, 2, 3)) == 6


def test_induced_bandit_preserves_performance():
    for seed in range(30):
        m = random_msp(seed, 5)
        for pi in list(enumerate_policies(m))[:20]:
            b = induced_bandit(m, pi)
            assert is_bandit(b)
            bp = StationaryPolicy.of([0 if b.actions[s] else CLAIM for s in range(b.n_states)])
            assert expected_performance(b, bp) == pytest.approx(expected_performance(m, pi), abs=1e-12)


def test_induced_bandit_halt_at_start():
    m = two_actions()
    b = induced_bandit(m, StationaryPolicy.halt(m))
    assert b.is_sink(b.start) and b.values[b.start] == 0.0


def test_cabinet_marginals():
    c = Cabinet.from_scenarios([(0.5, [10.0, 6.0]), (0.5, [0.0, 6.0])])
    assert c.marginal(0).mean() == pytest.approx(5.0)
    assert c.marginal(1).support == [(6.0, 1.0)]
    ind = Cabinet.independent([DiscreteDistribution.from_pairs([(0, 0.5), (1, 0.5)])] * 2)
    assert len(ind.probs) == 4


def test_invalid_instance_error_lists_violations():
    e = InvalidInstanceError(["a", "b"])
    assert e.violations == ["a", "b"]
