"""Single-agent utility problem: maximise expected performance minus a
posted price ``tau`` paid on claiming."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .indices import DEFAULT_SUPPORT_CAP, CappedValueTable, solve_index, successor_mixture
from .model import (
    CLAIM,
    MSP,
    NOCLAIM,
    Cabinet,
    DiscreteDistribution,
    StationaryPolicy,
    claim_probability,
    expected_performance,
    tree_msp,
)
from ._config import SizeLimitError


@dataclass(frozen=True, eq=False)
class SaupResult:
    value: float
    policy: StationaryPolicy | None = None
    kappa_table: CappedValueTable | None = None
    best_action: dict[int, int] = field(default_factory=dict)
    drawer: int | None = None


def cabinets_saup(cabinet: Cabinet, tau: float) -> SaupResult:
    """Open the drawer maximising ``E[(X_j - tau)^+]``; claim iff ``X_j >= tau``."""
    gains = [cabinet.marginal(j).expected_excess(tau) for j in range(cabinet.n_drawers)]
    j = int(np.argmax(gains))
    return SaupResult(value=float(gains[j]), drawer=j)


def maxsaup(m: MSP, tau: float, support_cap: int = DEFAULT_SUPPORT_CAP) -> SaupResult:
    """Optimal stationary policy for ``E[Perf - 1{claim} tau]``.

    Backward induction: sinks claim iff ``V >= tau``; at other states each
    action is scored by ``E[(kappa_next - tau)^+] - cost`` with the successor
    capped-value laws of the policy built so far, and the policy halts unless
    the best score is positive.  Indices at a halting state are those of its
    best action, so ``best_action`` is defined at every non-sink.
    """
    sigma: dict[int, float] = {}
    kappa: dict[int, DiscreteDistribution] = {}
    best: dict[int, int] = {}
    decisions = [NOCLAIM] * m.n_states
    reach = m.reachable
    for s in reversed(m.topological_order):
        if s not in reach:
            continue
        if m.is_sink(s):
            v = m.values[s]
            sigma[s] = v
            kappa[s] = DiscreteDistribution.point(v)
            decisions[s] = CLAIM if v >= tau else NOCLAIM
            continue
        top, top_score, top_mix = -1, -np.inf, None
        for k, a in enumerate(m.actions[s]):
            mix = successor_mixture(a, kappa)
            score = mix.expected_excess(tau) - a.cost
            if score > top_score:
                top, top_score, top_mix = k, score, mix
        a = m.actions[s][top]
        sig = solve_index(top_mix, a.cost)
        sigma[s] = sig
        kappa[s] = top_mix.capped(sig)
        if len(kappa[s]) > support_cap:
            raise SizeLimitError(f"capped-value law at state {s} exceeds {support_cap} atoms")
        best[s] = top
        decisions[s] = top if top_score > 0 else NOCLAIM
    table = CappedValueTable(sigma, kappa, m.start)
    value = table.kappa_start.expected_excess(tau)
    return SaupResult(value=value, policy=StationaryPolicy(tuple(decisions)), kappa_table=table, best_action=best)


def best_action_bandit(m: MSP, result: SaupResult) -> MSP:
    """``m`` restricted to MAXSAUP's best action at every non-sink.

    Unlike :func:`~cmsearch.model.induced_bandit` this keeps the states where
    the policy halts as non-sinks, so their indices match ``result.kappa_table``.
    """
    acts = []
    for s in range(m.n_states):
        if m.is_sink(s) or s not in result.best_action:
            acts.append(() if m.is_sink(s) else (m.actions[s][0],))
        else:
            acts.append((m.actions[s][result.best_action[s]],))
    return MSP(m.values, tuple(acts), m.start, m.labels)


def policy_saup_value(m: MSP, pi: StationaryPolicy, tau: float) -> float:
    """``E[Perf - 1{claim} tau]`` of a fixed policy."""
    return expected_performance(m, pi) - tau * claim_probability(m, pi)


def brute_force_saup(m: MSP, tau: float, node_budget: int = 100_000) -> float:
    """Best ``E[Perf - 1{claim} tau]`` over every deterministic policy.

    Unrolls ``m`` into its transcript tree and, at every node, takes the best
    of claiming, halting and each action; on a tree this is the maximum over
    all history-dependent deterministic policies.  Uses no index machinery.
    """
    tree = tree_msp(m, node_budget)
    best = np.zeros(tree.n_states)
    for s in reversed(range(tree.n_states)):
        opts = [tree.values[s] - tau, 0.0]
        for a in tree.actions[s]:
            opts.append(-a.cost + sum(p * best[t] for t, p in a.transitions))
        best[s] = max(opts)
    return float(best[tree.start])


def enumerate_saup(m: MSP, tau: float, policy_budget: int = 200_000) -> float:
    """Literal enumeration of every stationary policy of ``tree_msp(m)``."""
    tree = tree_msp(m)
    options = [
        ((CLAIM, NOCLAIM) if tree.is_sink(s) else tuple(range(len(tree.actions[s]))) + (CLAIM, NOCLAIM))
        for s in range(tree.n_states)
    ]
    count = int(np.prod([len(o) for o in options], dtype=float))
    if count > policy_budget:
        raise SizeLimitError(f"{count} policies exceed budget {policy_budget}")
    return max(policy_saup_value(tree, StationaryPolicy(combo), tau) for combo in itertools.product(*options))
