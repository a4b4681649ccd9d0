"""Seeded random instances at desk scale."""

from __future__ import annotations

import numpy as np

from .matroid import Matroid, max_weight_independent
from .model import (
    MSP,
    Action,
    Cabinet,
    CabinetsInstance,
    CMSInstance,
    DiscreteDistribution,
    NOIPandoraInstance,
    PandoraCabinetsInstance,
)
from .rng import make_rng


def _probs(rng, k: int) -> list[float]:
    p = np.round(rng.dirichlet(np.ones(k)), 3)
    p = np.maximum(p, 0.001)
    p[-1] = 1.0 - p[:-1].sum()
    if p[-1] <= 0:
        return [1.0 / k] * k
    return [float(x) for x in p]


def random_msp(rng, n_states: int = 6, max_actions: int = 2, max_trans: int = 3,
               value_scale: float = 2.0, cost_range=(0.02, 0.4)) -> MSP:
    """States ``0..n-1`` in topological order; the last state is always a sink."""
    rng = make_rng(rng) if isinstance(rng, (int, np.integer)) else rng
    n = int(n_states)
    values = [0.0] * n
    actions: list[tuple[Action, ...]] = []
    for s in range(n):
        later = n - 1 - s
        k = 0 if later == 0 else int(rng.integers(0, max_actions + 1))
        if s == 0 and later > 0:
            k = max(k, 1)
        acts = []
        for _ in range(k):
            m = int(rng.integers(1, min(max_trans, later) + 1))
            targets = sorted(rng.choice(np.arange(s + 1, n), size=m, replace=False).tolist())
            cost = float(np.round(rng.uniform(*cost_range), 3))
            acts.append(Action(cost, tuple(zip(targets, _probs(rng, m)))))
        actions.append(tuple(acts))
        if not acts:
            values[s] = float(np.round(rng.uniform(0, value_scale), 2))
    return MSP(tuple(values), tuple(actions), 0)


def random_bandit(rng, n_states: int = 6, **kw) -> MSP:
    return random_msp(rng, n_states, max_actions=1, **kw)


def random_distribution(rng, max_atoms: int = 3, scale: float = 10.0) -> DiscreteDistribution:
    k = int(rng.integers(1, max_atoms + 1))
    vals = np.round(rng.uniform(0, scale, size=k), 2)
    return DiscreteDistribution.from_pairs(zip(vals.tolist(), _probs(rng, k)))


def random_cabinet(rng, max_drawers: int = 3, max_atoms: int = 3, correlated: bool | None = None) -> Cabinet:
    m = int(rng.integers(1, max_drawers + 1))
    if correlated is None:
        correlated = bool(rng.integers(0, 2))
    if correlated:
        k = int(rng.integers(1, max_atoms + 1))
        vals = np.round(rng.uniform(0, 10, size=(k, m)), 2)
        return Cabinet.from_scenarios(zip(_probs(rng, k), vals.tolist()))
    return Cabinet.independent([random_distribution(rng, max_atoms) for _ in range(m)])


def random_matroid(rng, n: int, max_rank: int = 2) -> Matroid:
    if n >= 2 and rng.integers(0, 2):
        cut = int(rng.integers(1, n))
        blocks = [list(range(cut)), list(range(cut, n))]
        caps = [int(rng.integers(1, min(max_rank, len(b)) + 1)) for b in blocks]
        return Matroid.partition(blocks, caps)
    return Matroid.uniform(n, int(rng.integers(1, min(max_rank, n) + 1)))


def random_cabinets_instance(seed: int, max_n: int = 5, max_rank: int = 2, max_drawers: int = 3, max_atoms: int = 3) -> CabinetsInstance:
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    cabs = tuple(random_cabinet(rng, max_drawers, max_atoms) for _ in range(n))
    return CabinetsInstance(cabs, random_matroid(rng, n, max_rank))


def random_cms_instance(seed: int, max_n: int = 3, max_states: int = 5, max_rank: int = 2, max_actions: int = 2) -> CMSInstance:
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    procs = tuple(random_msp(rng, int(rng.integers(2, max_states + 1)), max_actions) for _ in range(n))
    return CMSInstance(procs, random_matroid(rng, n, max_rank))


def random_pandora_instance(seed: int, max_n: int = 2, max_drawers: int = 2, max_states: int = 4) -> PandoraCabinetsInstance:
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    cabs = tuple(
        tuple(random_bandit(rng, int(rng.integers(1, max_states + 1))) for _ in range(int(rng.integers(1, max_drawers + 1))))
        for _ in range(n)
    )
    return PandoraCabinetsInstance(cabs, Matroid.uniform(n, 1))


def random_noi_instance(seed: int, max_n: int = 2, max_atoms: int = 3) -> NOIPandoraInstance:
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    boxes = tuple(
        (float(np.round(rng.uniform(0.1, 2.0), 3)), random_distribution(rng, max_atoms)) for _ in range(n)
    )
    return NOIPandoraInstance(boxes)


def random_feasible_point(rng, m: Matroid) -> np.ndarray:
    """A random point of the matroid polytope (convex mix of bases, shrunk)."""
    bases = []
    for _ in range(3):
        w = rng.uniform(size=m.n)
        bases.append(sorted(max_weight_independent(m, w)))
    lam = rng.dirichlet(np.ones(len(bases)))
    q = np.zeros(m.n)
    for l, b in zip(lam, bases):
        q[b] += l
    return q * rng.uniform(0.5, 1.0, size=m.n)
