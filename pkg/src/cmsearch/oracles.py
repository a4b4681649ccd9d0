"""Exact optimal adaptive welfare for tiny instances, by exhaustive search.

Each oracle memoises on the joint state of all arrivals.  Claims are
deferred to the end: once exploration stops, the best independent set of
claimable values is taken.  Budgets are hard errors.
"""

from __future__ import annotations

import math

import numpy as np

from ._config import SizeLimitError
from .matroid import Matroid, max_weight_independent
from .model import CabinetsInstance, CMSInstance, NOIPandoraInstance, PandoraCabinetsInstance

STATE_BUDGET = 2_000_000


def _terminal(m: Matroid, weights) -> float:
    w = np.asarray(weights, dtype=float)
    return float(sum(w[i] for i in max_weight_independent(m, w)))


def _search(start: tuple, moves, terminal, budget: int) -> float:
    memo: dict[tuple, float] = {}

    def value(state):
        if state in memo:
            return memo[state]
        best = terminal(state)
        for cost, branches in moves(state):
            best = max(best, float(-cost + sum(p * value(t) for p, t in branches)))
        memo[state] = best
        if len(memo) > budget:
            raise SizeLimitError(f"oracle visited more than {budget} joint states")
        return best

    return float(value(start))


def _check_size(sizes, budget):
    if math.prod(sizes) > budget:
        raise SizeLimitError(f"joint state space of {math.prod(sizes)} exceeds budget {budget}")


def brute_force_opt_cms(inst: CMSInstance, budget: int = STATE_BUDGET) -> float:
    """Best expected welfare of any adaptive algorithm on ``inst``.

    The joint state is the tuple of current process states; processes are
    independent, so nothing else about the history matters.
    """
    procs = inst.processes
    _check_size([len(p.reachable) for p in procs], budget)

    def terminal(state):
        return _terminal(inst.matroid, [p.values[s] if p.is_sink(s) else 0.0 for p, s in zip(procs, state)])

    def moves(state):
        for i, (p, s) in enumerate(zip(procs, state)):
            for a in p.actions[s]:
                yield a.cost, [(pr, state[:i] + (t,) + state[i + 1:]) for t, pr in a.transitions if pr > 0]

    return _search(tuple(p.start for p in procs), moves, terminal, budget)


def brute_force_opt_cabinets(inst: CabinetsInstance, budget: int = STATE_BUDGET) -> float:
    """Per cabinet the state is unopened (``None``) or the value seen in the
    one drawer it was allowed to open."""
    margs = [[c.marginal(j) for j in range(c.n_drawers)] for c in inst.cabinets]
    _check_size([1 + sum(len(d) for d in ms) for ms in margs], budget)

    def terminal(state):
        return _terminal(inst.matroid, [0.0 if v is None else v for v in state])

    def moves(state):
        for i, v in enumerate(state):
            if v is None:
                for d in margs[i]:
                    yield 0.0, [(p, state[:i] + (float(x),) + state[i + 1:]) for x, p in zip(d.values, d.probs)]

    return _search((None,) * inst.n, moves, terminal, budget)


def brute_force_opt_pandora_cabinets(inst: PandoraCabinetsInstance, budget: int = STATE_BUDGET) -> float:
    """Per cabinet the state is unopened (``None``) or ``(drawer, state)``;
    committing to a drawer is free, advancing it costs as usual."""
    cabs = inst.cabinets
    _check_size([1 + sum(len(d.reachable) for d in ds) for ds in cabs], budget)

    def terminal(state):
        w = []
        for ds, st in zip(cabs, state):
            if st is None:
                w.append(0.0)
            else:
                d = ds[st[0]]
                w.append(d.values[st[1]] if d.is_sink(st[1]) else 0.0)
        return _terminal(inst.matroid, w)

    def moves(state):
        for i, st in enumerate(state):
            if st is None:
                for j, d in enumerate(cabs[i]):
                    yield 0.0, [(1.0, state[:i] + ((j, d.start),) + state[i + 1:])]
                continue
            j, s = st
            for a in cabs[i][j].actions[s]:
                yield a.cost, [(p, state[:i] + ((j, t),) + state[i + 1:]) for t, p in a.transitions if p > 0]

    return _search((None,) * inst.n, moves, terminal, budget)


def brute_force_opt_noi(inst: NOIPandoraInstance, budget: int = STATE_BUDGET) -> float:
    """Pandora's box with optional inspection: pay to see a box, or take a
    box unseen for its mean; at most one box is kept."""
    boxes = inst.boxes
    _check_size([1 + len(d) for _, d in boxes], budget)

    def terminal(state):
        best = 0.0
        for (_, d), v in zip(boxes, state):
            best = max(best, d.mean() if v is None else v)
        return best

    def moves(state):
        for i, v in enumerate(state):
            if v is None:
                c, d = boxes[i]
                yield c, [(p, state[:i] + (float(x),) + state[i + 1:]) for x, p in zip(d.values, d.probs)]

    return _search((None,) * inst.n, moves, terminal, budget)


def brute_force_opt(inst, budget: int = STATE_BUDGET) -> float:
    if isinstance(inst, CMSInstance):
        return brute_force_opt_cms(inst, budget)
    if isinstance(inst, CabinetsInstance):
        return brute_force_opt_cabinets(inst, budget)
    if isinstance(inst, PandoraCabinetsInstance):
        return brute_force_opt_pandora_cabinets(inst, budget)
    if isinstance(inst, NOIPandoraInstance):
        return brute_force_opt_noi(inst, budget)
    raise TypeError(f"no oracle for {type(inst).__name__}")


def exante_upper_check(inst, exante_objective: float, tol: float = 1e-9) -> bool:
    """Whether the ex-ante objective is at least the adaptive optimum."""
    return exante_objective >= brute_force_opt(inst) - tol


