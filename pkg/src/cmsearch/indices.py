"""Weitzman indices and capped values for bandit processes."""

from __future__ import annotations

import math
from dataclasses import dataclass


from ._config import SizeLimitError
from .model import (
    CLAIM,
    MSP,
    NOCLAIM,
    DiscreteDistribution,
    StationaryPolicy,
    expected_performance,
    is_bandit,
)

DEFAULT_SUPPORT_CAP = 100_000
EXPOSURE_TOL = 1e-12


class NotABanditError(TypeError):
    pass


@dataclass(frozen=True, eq=False)
class CappedValueTable:
    """Per-state index ``sigma`` and law of the capped value ``kappa``.

    Only states reachable from the start are populated.
    """

    sigma: dict[int, float]
    kappa: dict[int, DiscreteDistribution]
    start: int

    @property
    def kappa_start(self) -> DiscreteDistribution:
        return self.kappa[self.start]

    @property
    def sigma_start(self) -> float:
        return self.sigma[self.start]


def solve_index(k: DiscreteDistribution, cost: float) -> float:
    """The unique ``x`` with ``E[(K - x)^+] = cost`` (``cost > 0``).

    ``x -> E[(K - x)^+]`` is piecewise linear and decreasing; below the
    smallest atom it is ``E[K] - x``, so the root always exists.
    """
    vals = k.values[::-1]
    probs = k.probs[::-1]
    mass = 0.0
    first_moment = 0.0
    for i in range(len(vals)):
        mass += probs[i]
        first_moment += probs[i] * vals[i]
        x = (first_moment - cost) / mass
        lower = vals[i + 1] if i + 1 < len(vals) else -math.inf
        if x >= lower:
            return float(x)
    raise AssertionError("unreachable")


def successor_mixture(action, kappa: dict[int, DiscreteDistribution]) -> DiscreteDistribution:
    return DiscreteDistribution.mixture([(p, kappa[t]) for t, p in action.transitions if p > 0])


def _indices_for_choice(m: MSP, choice: dict[int, int], support_cap: int) -> CappedValueTable:
    sigma: dict[int, float] = {}
    kappa: dict[int, DiscreteDistribution] = {}
    reach = m.reachable
    for s in reversed(m.topological_order):
        if s not in reach:
            continue
        if m.is_sink(s):
            sigma[s] = m.values[s]
            kappa[s] = DiscreteDistribution.point(m.values[s])
            continue
        a = m.actions[s][choice[s]]
        nxt = successor_mixture(a, kappa)
        sig = solve_index(nxt, a.cost)
        sigma[s] = sig
        kappa[s] = nxt.capped(sig)
        if len(kappa[s]) > support_cap:
            raise SizeLimitError(f"capped-value law at state {s} exceeds {support_cap} atoms")
    return CappedValueTable(sigma, kappa, m.start)


def compute_indices(b: MSP, support_cap: int = DEFAULT_SUPPORT_CAP) -> CappedValueTable:
    if not is_bandit(b):
        raise NotABanditError("compute_indices needs a bandit (at most one action per state)")
    return _indices_for_choice(b, {s: 0 for s in range(b.n_states)}, support_cap)


def threshold_bandit_policy(b: MSP, tau: float, tie_claim: bool = True, table: CappedValueTable | None = None) -> StationaryPolicy:
    """Advance while the index clears ``tau``; claim sinks whose value clears it."""
    if not is_bandit(b):
        raise NotABanditError("threshold policies are defined on bandits")
    table = table or compute_indices(b)

    def clears(x):
        return x > tau or (tie_claim and x == tau)

    out = []
    for s in range(b.n_states):
        if s not in table.sigma:
            out.append(NOCLAIM)
        elif b.is_sink(s):
            out.append(CLAIM if clears(b.values[s]) else NOCLAIM)
        else:
            out.append(0 if clears(table.sigma[s]) else NOCLAIM)
    return StationaryPolicy(tuple(out))


def is_exposed(b: MSP, pi: StationaryPolicy, table: CappedValueTable | None = None) -> bool:
    """Whether ``pi`` halts unclaimed, with positive probability, at a state
    whose index exceeds that of some earlier state on the same path."""
    if not is_bandit(b):
        raise NotABanditError("exposure is defined on bandits")
    pi.check(b)
    table = table or compute_indices(b)
    seen = set()
    stack = [(b.start, math.inf)]
    while stack:
        s, low = stack.pop()
        if (s, low) in seen:
            continue
        seen.add((s, low))
        d = pi[s]
        if d == NOCLAIM:
            if low < table.sigma[s] - EXPOSURE_TOL:
                return True
        elif d >= 0:
            nxt_low = min(low, table.sigma[s])
            for t, p in b.actions[s][d].transitions:
                if p > 0:
                    stack.append((t, nxt_low))
    return False


def amortization_check(b: MSP, pi: StationaryPolicy, table: CappedValueTable | None = None) -> tuple[float, float]:
    """``(E[Perf], E[kappa * 1{claim}])`` computed exactly.

    The right side runs over the product chain (state, lowest index so far);
    a claim at state ``s`` with running minimum ``low`` is credited
    ``E[min(low, kappa_s)]``.
    """
    if not is_bandit(b):
        raise NotABanditError("amortization is defined on bandits")
    pi.check(b)
    table = table or compute_indices(b)
    lhs = expected_performance(b, pi)
    memo: dict[tuple[int, float], float] = {}

    def rhs(s: int, low: float) -> float:
        key = (s, low)
        if key in memo:
            return memo[key]
        d = pi[s]
        if d == CLAIM:
            val = table.kappa[s].expected_min(low)
        elif d == NOCLAIM:
            val = 0.0
        else:
            nxt = min(low, table.sigma[s])
            val = sum(p * rhs(t, nxt) for t, p in b.actions[s][d].transitions if p > 0)
        memo[key] = val
        return val

    return lhs, float(rhs(b.start, math.inf))


def claim_probability_from_kappa(table: CappedValueTable, tau: float, tie_claim: bool = True) -> float:
    return table.kappa_start.prob_at_least(tau, strict=not tie_claim)


def kappa_excess(table: CappedValueTable, tau: float) -> float:
    """``E[(kappa - tau)^+]`` at the start state."""
    return table.kappa_start.expected_excess(tau)


__all__ = [
    "CappedValueTable",
    "NotABanditError",
    "amortization_check",
    "claim_probability_from_kappa",
    "compute_indices",
    "is_exposed",
    "kappa_excess",
    "solve_index",
    "threshold_bandit_policy",
]
