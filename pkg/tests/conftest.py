import os

import numpy as np
import pytest

from cmsearch import MSP, Cabinet, DiscreteDistribution, Matroid

# keep hypothesis quick and reproducible
try:
    from hypothesis import settings

    settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True)
    settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))
except ImportError:  # pragma: no cover
    pass


def box_msp(cost=0.1):
    """Pay ``cost`` to see 0 or 1 with equal odds."""
    return MSP.build([0, 0, 1], [[(cost, [(1, 0.5), (2, 0.5)])], [], []])


def two_stage():
    # s0 (0.05) -> {sink 0, s1}; s1 (0.1) -> {0, 1}
    return MSP.build([0, 0, 0, 0, 1], [[(0.05, [(1, 0.5), (2, 0.5)])], [], [(0.1, [(3, 0.5), (4, 0.5)])], [], []])


def two_actions():
    # a1: 0.1 -> {0, 1}; a2: 0.4 -> 2
    return MSP.build([0, 0, 1, 2], [[(0.1, [(1, 0.5), (2, 0.5)]), (0.4, [(3, 1.0)])], [], [], []])


def dist(*pairs):
    return DiscreteDistribution.from_pairs(pairs)


def cab(*scenarios):
    return Cabinet.from_scenarios(scenarios)


@pytest.fixture
def box():
    return box_msp()


@pytest.fixture
def rank1():
    return lambda n: Matroid.uniform(n, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
