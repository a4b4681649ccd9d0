"""Markov Search Processes, policies, transcripts and instance containers.

States of an :class:`MSP` are the integers ``0 .. n_states - 1``; actions at a
state are addressed by their position in that state's action list.  A
stationary policy maps every state to an action index or to one of the two
halting decisions :data:`NOCLAIM` and :data:`CLAIM`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ._config import TOL, PolicyMismatchError, SizeLimitError
from .rng import make_rng

NOCLAIM = -1
CLAIM = -2

NONHALTED = "nonhalted"
HALTED_CLAIM = "halted-claim"
HALTED_NOCLAIM = "halted-noclaim"


class InvalidInstanceError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finite-support law, values sorted ascending with distinct atoms."""

    values: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], tol: float = TOL) -> "DiscreteDistribution":
        pairs = [(float(v), float(p)) for v, p in pairs]
        if not pairs:
            raise ValueError("empty support")
        for v, p in pairs:
            if not np.isfinite(v):
                raise ValueError(f"non-finite support value {v}")
            if p < -tol or not np.isfinite(p):
                raise ValueError(f"invalid probability {p}")
        total = sum(p for _, p in pairs)
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        return cls._build(np.array([v for v, _ in pairs]), np.array([p for _, p in pairs]))

    @classmethod
    def point(cls, value: float) -> "DiscreteDistribution":
        return cls(np.array([float(value)]), np.array([1.0]))

    @classmethod
    def _build(cls, values: np.ndarray, probs: np.ndarray) -> "DiscreteDistribution":
        keep = probs > 0
        values, probs = values[keep], probs[keep]
        order = np.argsort(values, kind="stable")
        values, probs = values[order], probs[order]
        uniq, inv = np.unique(values, return_inverse=True)
        merged = np.zeros(len(uniq))
        np.add.at(merged, inv, probs)
        return cls(uniq, merged)

    @classmethod
    def mixture(cls, parts: Sequence[tuple[float, "DiscreteDistribution"]]) -> "DiscreteDistribution":
        values = np.concatenate([d.values for _, d in parts])
        probs = np.concatenate([w * d.probs for w, d in parts])
        return cls._build(values, probs)

    @property
    def support(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def __len__(self) -> int:
        return len(self.values)

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def expected_excess(self, x: float) -> float:
        """``E[(X - x)^+]``."""
        return float(np.dot(np.maximum(self.values - x, 0.0), self.probs))

    def prob_at_least(self, x: float, strict: bool = False) -> float:
        mask = self.values > x if strict else self.values >= x
        return float(self.probs[mask].sum())

    def capped(self, cap: float) -> "DiscreteDistribution":
        """Law of ``min(cap, X)``."""
        return DiscreteDistribution._build(np.minimum(self.values, cap), self.probs.copy())

    def expected_min(self, cap: float) -> float:
        return float(np.dot(np.minimum(self.values, cap), self.probs))

    def approx_equal(self, other: "DiscreteDistribution", tol: float = TOL) -> bool:
        return (
            len(self) == len(other)
            and bool(np.allclose(self.values, other.values, atol=tol, rtol=0))
            and bool(np.allclose(self.probs, other.probs, atol=tol, rtol=0))
        )

    def __repr__(self) -> str:
        return f"DiscreteDistribution({self.support})"


# ---------------------------------------------------------------------------
# MSPs


@dataclass(frozen=True)
class Action:
    cost: float
    transitions: tuple[tuple[int, float], ...]

    @classmethod
    def make(cls, cost: float, transitions: Iterable[tuple[int, float]]) -> "Action":
        return cls(float(cost), tuple((int(t), float(p)) for t, p in transitions))


@dataclass(frozen=True)
class MSP:
    """A finite acyclic Markov Search Process.

    Attributes:
        values: reward ``V(s)`` per state; nonzero only at sinks.
        actions: per state, the tuple of legal actions (empty at sinks).
        start: the start state.
        labels: optional human-readable state names.
    """

    values: tuple[float, ...]
    actions: tuple[tuple[Action, ...], ...]
    start: int = 0
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    @classmethod
    def build(cls, values, actions, start: int = 0, labels=None) -> "MSP":
        acts = tuple(
            tuple(a if isinstance(a, Action) else Action.make(*a) for a in row) for row in actions
        )
        return cls(tuple(float(v) for v in values), acts, int(start), None if labels is None else tuple(labels))

    @classmethod
    def sink(cls, value: float) -> "MSP":
        return cls((float(value),), ((),), 0)

    @property
    def n_states(self) -> int:
        return len(self.values)

    def is_sink(self, s: int) -> bool:
        return len(self.actions[s]) == 0

    def successors(self, s: int) -> set[int]:
        return {t for a in self.actions[s] for t, p in a.transitions if p > 0}

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """States in an order where every edge goes forward; raises if cyclic."""
        order = _toposort(self)
        if order is None:
            raise InvalidInstanceError(["state graph contains a cycle"])
        return tuple(order)

    @cached_property
    def reachable(self) -> frozenset[int]:
        seen = {self.start}
        stack = [self.start]
        while stack:
            s = stack.pop()
            for t in self.successors(s):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    @cached_property
    def depth(self) -> int:
        """Largest number of actions on any path from the start."""
        longest = {}
        for s in reversed(self.topological_order):
            succ = self.successors(s)
            longest[s] = 1 + max(longest[t] for t in succ) if succ else 0
        return longest[self.start]

    @property
    def max_value(self) -> float:
        return max(self.values)


def _toposort(m: MSP):
    n = m.n_states
    indeg = [0] * n
    succ = []
    for s in range(n):
        out = [t for t in m.successors(s) if 0 <= t < n]
        succ.append(out)
        for t in out:
            indeg[t] += 1
    ready = [s for s in range(n) if indeg[s] == 0]
    order = []
    while ready:
        s = ready.pop()
        order.append(s)
        for t in succ[s]:
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    return order if len(order) == n else None


def validate_msp(m: MSP, tol: float = TOL) -> list[str]:
    """List every broken MSP invariant; an empty list means ``m`` is valid."""
    out = []
    n = m.n_states
    if n == 0:
        return ["MSP has no states"]
    if len(m.actions) != n:
        out.append(f"{len(m.actions)} action lists for {n} states")
        return out
    if not 0 <= m.start < n:
        out.append(f"start state {m.start} out of range")
    for s in range(n):
        v = m.values[s]
        if not np.isfinite(v) or v < 0:
            out.append(f"state {s}: value {v} must be a nonnegative real")
        if m.actions[s] and v != 0:
            out.append(f"state {s}: nonzero value {v} at a non-sink")
        for k, a in enumerate(m.actions[s]):
            if not (a.cost > 0 and np.isfinite(a.cost)):
                out.append(f"state {s} action {k}: cost {a.cost} must be strictly positive")
            if not a.transitions:
                out.append(f"state {s} action {k}: no transitions")
            total = 0.0
            for t, p in a.transitions:
                if not 0 <= t < n:
                    out.append(f"state {s} action {k}: target {t} out of range")
                if p < 0 or p > 1 + tol:
                    out.append(f"state {s} action {k}: probability {p} outside [0, 1]")
                total += p
            if a.transitions and abs(total - 1.0) > tol:
                out.append(f"state {s} action {k}: probability-sum {total!r} != 1")
    if not any("out of range" in v for v in out) and _toposort(m) is None:
        out.append("DAG violation: state graph contains a cycle")
    return out


def ensure_valid(m: MSP) -> MSP:
    problems = validate_msp(m)
    if problems:
        raise InvalidInstanceError(problems)
    return m


def is_bandit(m: MSP) -> bool:
    return all(len(row) <= 1 for row in m.actions)


# ---------------------------------------------------------------------------
# policies and transcripts


@dataclass(frozen=True)
class StationaryPolicy:
    """Per-state decision: an action index, :data:`NOCLAIM` or :data:`CLAIM`."""

    decisions: tuple[int, ...]

    @classmethod
    def of(cls, decisions: Iterable[int]) -> "StationaryPolicy":
        return cls(tuple(int(d) for d in decisions))

    @classmethod
    def advance_and_claim(cls, m: MSP) -> "StationaryPolicy":
        """Take the first action everywhere, claim at every sink."""
        return cls(tuple(0 if row else CLAIM for row in m.actions))

    @classmethod
    def halt(cls, m: MSP) -> "StationaryPolicy":
        return cls((NOCLAIM,) * m.n_states)

    def __getitem__(self, s: int) -> int:
        return self.decisions[s]

    def check(self, m: MSP) -> None:
        if len(self.decisions) != m.n_states:
            raise PolicyMismatchError(f"policy covers {len(self.decisions)} states, MSP has {m.n_states}")
        for s, d in enumerate(self.decisions):
            if d >= 0 and d >= len(m.actions[s]):
                raise PolicyMismatchError(f"state {s}: action {d} is not legal")
            if d < 0 and d not in (CLAIM, NOCLAIM):
                raise PolicyMismatchError(f"state {s}: unknown decision {d}")


@dataclass(frozen=True)
class Transcript:
    steps: tuple[tuple[int, int], ...]
    terminal: str = NONHALTED

    def is_valid(self, m: MSP) -> bool:
        s = m.start
        for a, t in self.steps:
            if not 0 <= a < len(m.actions[s]):
                return False
            if not any(tt == t and p > 0 for tt, p in m.actions[s][a].transitions):
                return False
            s = t
        return True

    def final_state(self, m: MSP) -> int:
        return self.steps[-1][1] if self.steps else m.start


def next_state(action: Action, u: float) -> int:
    """Inverse-CDF transition draw: first target whose cumulative mass exceeds ``u``."""
    trans = action.transitions
    acc = 0.0
    for t, p in trans[:-1]:
        acc += p
        if u < acc:
            return t
    return trans[-1][0]


def simulate_policy(m: MSP, pi: StationaryPolicy, seed: int) -> tuple[Transcript, float]:
    """Run ``pi`` on ``m`` with one Philox uniform per transition."""
    pi.check(m)
    rng = make_rng(seed)
    s = m.start
    steps = []
    perf = 0.0
    while True:
        d = pi[s]
        if d == CLAIM:
            return Transcript(tuple(steps), HALTED_CLAIM), perf + m.values[s]
        if d == NOCLAIM:
            return Transcript(tuple(steps), HALTED_NOCLAIM), perf
        if m.is_sink(s):
            raise PolicyMismatchError(f"policy takes an action at sink {s}")
        a = m.actions[s][d]
        perf -= a.cost
        s = next_state(a, rng.random())
        steps.append((d, s))


def expected_performance(m: MSP, pi: StationaryPolicy) -> float:
    """Exact ``E[Perf]`` by backward induction."""
    pi.check(m)
    val = {}
    for s in reversed(m.topological_order):
        d = pi[s]
        if d == CLAIM:
            val[s] = m.values[s]
        elif d == NOCLAIM:
            val[s] = 0.0
        else:
            a = m.actions[s][d]
            val[s] = -a.cost + sum(p * val[t] for t, p in a.transitions)
    return float(val[m.start])


def claim_probability(m: MSP, pi: StationaryPolicy) -> float:
    pi.check(m)
    val = {}
    for s in reversed(m.topological_order):
        d = pi[s]
        if d == CLAIM:
            val[s] = 1.0
        elif d == NOCLAIM:
            val[s] = 0.0
        else:
            val[s] = sum(p * val[t] for t, p in m.actions[s][d].transitions)
    return float(val[m.start])


def enumerate_policies(m: MSP, claim_at_nonsinks: bool = False):
    """Yield every stationary deterministic policy on the reachable states.

    Unreachable states are fixed to :data:`NOCLAIM`.  Halting with a claim at a
    non-sink (value zero) is included only when ``claim_at_nonsinks`` is set.
    """
    import itertools

    reach = sorted(m.reachable)
    options = []
    for s in reach:
        if m.is_sink(s):
            options.append((CLAIM, NOCLAIM))
        else:
            opts = list(range(len(m.actions[s]))) + [NOCLAIM]
            if claim_at_nonsinks:
                opts.append(CLAIM)
            options.append(tuple(opts))
    base = [NOCLAIM] * m.n_states
    for combo in itertools.product(*options):
        for s, d in zip(reach, combo):
            base[s] = d
        yield StationaryPolicy(tuple(base))


# ---------------------------------------------------------------------------
# structural constructions


def tree_msp(m: MSP, node_budget: int = 100_000) -> MSP:
    """Unroll ``m`` into a tree with one state per non-halted transcript."""
    m.topological_order
    origin = [m.start]
    labels = [str(m.start)]
    actions: list[list] = [None]
    frontier = [0]
    while frontier:
        node = frontier.pop()
        s = origin[node]
        row = []
        for k, a in enumerate(m.actions[s]):
            trans = []
            for t, p in a.transitions:
                if p <= 0:
                    continue
                if len(origin) >= node_budget:
                    raise SizeLimitError(f"tree MSP exceeds node budget {node_budget}")
                child = len(origin)
                origin.append(t)
                labels.append(f"{labels[node]}>{k}:{t}")
                actions.append(None)
                trans.append((child, p))
                frontier.append(child)
            row.append(Action(a.cost, tuple(trans)))
        actions[node] = tuple(row)
    return MSP(tuple(m.values[s] for s in origin), tuple(actions), 0, tuple(labels))


def tree_origin(tree: MSP) -> list[int]:
    """Original state of every node of a tree built by :func:`tree_msp`."""
    return [int(lbl.rsplit(":", 1)[-1]) if ":" in lbl else int(lbl) for lbl in tree.labels]


def induced_bandit(m: MSP, pi: StationaryPolicy) -> MSP:
    """Restrict ``m`` to the actions ``pi`` takes; halting states become sinks."""
    pi.check(m)
    values = []
    actions = []
    for s in range(m.n_states):
        d = pi[s]
        if d >= 0:
            values.append(0.0)
            actions.append((m.actions[s][d],))
        else:
            values.append(m.values[s] if (d == CLAIM and m.is_sink(s)) else 0.0)
            actions.append(())
    return MSP(tuple(values), tuple(actions), m.start, m.labels)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True, eq=False)
class Cabinet:
    """Joint law of a cabinet's drawer values as an explicit scenario list.

    ``probs[k]`` is the probability of scenario ``k`` and ``values[k, j]`` the
    value in drawer ``j`` under it.
    """

    probs: np.ndarray
    values: np.ndarray

    @classmethod
    def from_scenarios(cls, scenarios: Iterable[tuple[float, Sequence[float]]]) -> "Cabinet":
        scen = [(float(p), [float(v) for v in vals]) for p, vals in scenarios]
        widths = {len(v) for _, v in scen}
        if len(widths) != 1:
            raise ValueError("scenarios disagree on the number of drawers")
        probs = np.array([p for p, _ in scen])
        values = np.array([v for _, v in scen], dtype=float).reshape(len(scen), widths.pop())
        keep = probs > 0
        return cls(probs[keep], values[keep])

    @classmethod
    def independent(cls, marginals: Sequence[DiscreteDistribution], budget: int = 100_000) -> "Cabinet":
        """Product law of independent drawers."""
        size = int(np.prod([len(d) for d in marginals]))
        if size > budget:
            raise SizeLimitError(f"{size} joint scenarios exceed budget {budget}")
        grids = np.meshgrid(*[np.arange(len(d)) for d in marginals], indexing="ij")
        idx = [g.ravel() for g in grids]
        probs = np.prod([d.probs[i] for d, i in zip(marginals, idx)], axis=0)
        values = np.stack([d.values[i] for d, i in zip(marginals, idx)], axis=1)
        return cls(np.asarray(probs, dtype=float), values)

    @property
    def n_drawers(self) -> int:
        return self.values.shape[1]

    def marginal(self, j: int) -> DiscreteDistribution:
        return DiscreteDistribution._build(self.values[:, j].copy(), self.probs.copy())

    def violations(self, tol: float = TOL) -> list[str]:
        out = []
        if self.values.shape[1] < 1:
            out.append("cabinet has no drawers")
        if abs(self.probs.sum() - 1.0) > tol:
            out.append(f"scenario probabilities sum to {self.probs.sum()!r}")
        if (self.values < 0).any():
            out.append("negative drawer value")
        if not np.isfinite(self.values).all():
            out.append("non-finite drawer value")
        return out


@dataclass(frozen=True, eq=False)
class CabinetsInstance:
    cabinets: tuple[Cabinet, ...]
    matroid: object

    @property
    def n(self) -> int:
        return len(self.cabinets)

    def violations(self) -> list[str]:
        out = [f"cabinet {i}: {v}" for i, c in enumerate(self.cabinets) for v in c.violations()]
        if self.matroid.n != self.n:
            out.append(f"matroid ground size {self.matroid.n} != {self.n} cabinets")
        return out


@dataclass(frozen=True, eq=False)
class PandoraCabinetsInstance:
    cabinets: tuple[tuple[MSP, ...], ...]
    matroid: object

    @property
    def n(self) -> int:
        return len(self.cabinets)

    def violations(self) -> list[str]:
        out = []
        for i, drawers in enumerate(self.cabinets):
            if not drawers:
                out.append(f"cabinet {i}: no drawers")
            for j, b in enumerate(drawers):
                out += [f"cabinet {i} drawer {j}: {v}" for v in validate_msp(b)]
                if not is_bandit(b):
                    out.append(f"cabinet {i} drawer {j}: not a bandit")
        if self.matroid.n != self.n:
            out.append(f"matroid ground size {self.matroid.n} != {self.n} cabinets")
        return out


@dataclass(frozen=True, eq=False)
class CMSInstance:
    processes: tuple[MSP, ...]
    matroid: object

    @property
    def n(self) -> int:
        return len(self.processes)

    def violations(self) -> list[str]:
        out = [f"process {i}: {v}" for i, m in enumerate(self.processes) for v in validate_msp(m)]
        if self.matroid.n != self.n:
            out.append(f"matroid ground size {self.matroid.n} != {self.n} processes")
        return out


@dataclass(frozen=True, eq=False)
class NOIPandoraInstance:
    """Pandora's Box where any unopened box may also be taken uninspected."""

    boxes: tuple[tuple[float, DiscreteDistribution], ...]

    @property
    def n(self) -> int:
        return len(self.boxes)

    def violations(self) -> list[str]:
        out = []
        for i, (c, d) in enumerate(self.boxes):
            if not c > 0:
                out.append(f"box {i}: inspection cost {c} must be positive")
            if (d.values < 0).any():
                out.append(f"box {i}: negative value in support")
        return out
