"""Online threshold algorithms over a matroid of arrivals.

Every runner first compiles a :class:`Plan`: for each arrival ``i`` and each
set of earlier claims it may face, the threshold, the drawer or policy used
and the states it can visit, flattened into one arena.  A plan is then
either traced once (``run``, giving a :class:`RunRecord`) or simulated in
bulk by the kernels (``simulate``).  Both read the same uniform draws, so
``plan.run(seed)`` replays trial 0 of ``plan.simulate(trials, seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._config import SizeLimitError
from .exante import ExAnteSolution, exante_opt_cms
from .indices import NotABanditError, compute_indices, threshold_bandit_policy
from .kernels import Arena, arena_uniform_row, simulate_arena
from .matroid import EXPLICIT_BUDGET, Matroid, _remaining, exact_dq, polytope_member, sample_feasible_sets, to_set
from .model import (
    CLAIM,
    MSP,
    NOCLAIM,
    Action,
    CabinetsInstance,
    CMSInstance,
    PandoraCabinetsInstance,
    StationaryPolicy,
    is_bandit,
)
from .saup import cabinets_saup, maxsaup

MC_SAMPLES = 2000
MAX_ARRIVALS = 16
ARENA_BUDGET = 50_000_000


# -- thresholds -----------------------------------------------------------------


class MatroidThresholds:
    """``T(i, A) = 1/2 E[R(A) - R(A + i)]`` with ``R`` the best remaining
    ``z``-weight over a random feasible set ``F'`` drawn from ``dq``."""

    def __init__(self, m: Matroid, z, dq):
        self.m = m
        self.z = np.asarray(z, dtype=float)
        self.dq = [(float(p), sum(1 << e for e in s)) for p, s in dq]
        self._memo: dict[tuple[int, int], float] = {}

    @classmethod
    def build(cls, m: Matroid, q, z, mode: str = "auto", samples: int = MC_SAMPLES, seed: int = 0) -> "MatroidThresholds":
        q = np.asarray(q, dtype=float)
        if polytope_member(m, q) is not True:
            raise ValueError("q is outside the matroid polytope")
        if np.any(np.asarray(z) < 0):
            raise ValueError("z must be nonnegative")
        if mode == "auto":
            mode = "exact" if m.n <= EXPLICIT_BUDGET else "montecarlo"
        if mode == "exact":
            dq = exact_dq(m, q)
        elif mode == "montecarlo":
            draws = sample_feasible_sets(m, q, samples, seed)
            masks, counts = np.unique(draws, return_counts=True)
            dq = [(c / samples, to_set(int(k))) for k, c in zip(masks, counts)]
        else:
            raise ValueError(f"unknown threshold mode {mode!r}")
        out = cls(m, z, dq)
        out.mode = mode
        return out

    def __call__(self, i: int, mask: int) -> float:
        key = (i, mask)
        if key not in self._memo:
            if not self.m.is_independent(mask | 1 << i):
                self._memo[key] = math.inf
            else:
                tot = 0.0
                for p, f in self.dq:
                    tot += p * (_remaining(self.m, self.z, f, mask) - _remaining(self.m, self.z, f, mask | 1 << i))
                self._memo[key] = 0.5 * tot
        return self._memo[key]


# -- arena assembly -----------------------------------------------------------------


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.values: list[float] = []
        self.cost: list[float] = []
        self.tptr: list[int] = [0]
        self.targets: list[int] = []
        self.cdf: list[float] = []
        self.tags: list[int] = []
        self.blocks: dict = {}
        self.rows: dict = {}
        self.row_list: list[dict[int, int]] = []
        self.depth = np.zeros(n, dtype=np.int64)
        K = 1 << n
        self.feasible = np.zeros((n, K), dtype=bool)
        self.tie_p = np.ones((n, K))
        self.row_tie = np.zeros((n, K), dtype=np.int64)
        self.row_else = np.zeros((n, K), dtype=np.int64)
        self.start = np.zeros((n, K), dtype=np.int64)
        self.threshold = np.full((n, K), math.inf)
        self.choice = np.full((n, K), -1, dtype=np.int64)

    def block(self, key, m: MSP, tags=None):
        """Global (offset, per-state action ids) of ``m``, added once per key."""
        if key in self.blocks:
            return self.blocks[key]
        off = len(self.values)
        self.values.extend(m.values)
        self.tags.extend(tags if tags is not None else [-1] * m.n_states)
        act_ids = []
        for s in range(m.n_states):
            ids = []
            for a in m.actions[s]:
                ids.append(len(self.cost))
                self.cost.append(a.cost)
                acc = 0.0
                for k, (t, p) in enumerate(a.transitions):
                    acc += p
                    self.targets.append(off + t)
                    self.cdf.append(acc if k < len(a.transitions) - 1 else 1.0)
                self.tptr.append(len(self.targets))
            act_ids.append(ids)
        self.blocks[key] = (off, act_ids, m)
        return self.blocks[key]

    def row(self, key, blk, pi: StationaryPolicy) -> int:
        if key in self.rows:
            return self.rows[key]
        off, act_ids, m = blk
        entries = {}
        for s in range(m.n_states):
            d = pi[s]
            entries[off + s] = act_ids[s][d] if d >= 0 else d
        self.rows[key] = len(self.row_list)
        self.row_list.append(entries)
        return self.rows[key]

    def set_arrival(self, i, mask, blk, row_tie, row_else, tie_p, threshold, choice):
        off, _, m = blk
        self.feasible[i, mask] = True
        self.start[i, mask] = off + m.start
        self.row_tie[i, mask] = row_tie
        self.row_else[i, mask] = row_else
        self.tie_p[i, mask] = tie_p
        self.threshold[i, mask] = threshold
        self.choice[i, mask] = choice
        self.depth[i] = max(self.depth[i], m.depth)

    def finish(self) -> Arena:
        S = len(self.values)
        R = max(1, len(self.row_list))
        if R * S > ARENA_BUDGET:
            raise SizeLimitError(f"policy table of {R} x {S} entries exceeds budget")
        pol = np.full((R, S), NOCLAIM, dtype=np.int64)
        for r, entries in enumerate(self.row_list):
            for s, d in entries.items():
                pol[r, s] = d
        col0 = np.concatenate([[0], np.cumsum(1 + self.depth)[:-1]]).astype(np.int64)
        return Arena(
            values=np.asarray(self.values, dtype=float),
            cost=np.asarray(self.cost, dtype=float),
            tptr=np.asarray(self.tptr, dtype=np.int64),
            targets=np.asarray(self.targets, dtype=np.int64),
            cdf=np.asarray(self.cdf, dtype=float),
            pol=pol,
            feasible=self.feasible,
            tie_p=self.tie_p,
            row_tie=self.row_tie,
            row_else=self.row_else,
            start=self.start,
            col0=col0,
            n_cols=int((1 + self.depth).sum()),
        )


def _reachable_masks(m: Matroid, i: int):
    """Independent subsets of the arrivals before ``i``."""
    indep = m.independent_table
    for mask in range(1 << i):
        if indep[mask]:
            yield mask


def _chance_msp(dist_values, dist_probs) -> MSP:
    """Zero-cost chance node over sinks; only ever used inside the arena."""
    vals = [0.0] + [float(v) for v in dist_values]
    act = Action(0.0, tuple((k + 1, float(p)) for k, p in enumerate(dist_probs)))
    return MSP(tuple(vals), ((act,),) + ((),) * len(dist_values), 0)


def _claim_at_least(m: MSP, tau: float) -> StationaryPolicy:
    dec = []
    for s in range(m.n_states):
        if m.is_sink(s):
            dec.append(CLAIM if m.values[s] >= tau else NOCLAIM)
        else:
            dec.append(0)
    return StationaryPolicy(tuple(dec))


# -- runs -----------------------------------------------------------------


@dataclass(frozen=True)
class ArrivalRecord:
    threshold: float
    choice: int | None
    claimed: bool
    contribution: float
    path: tuple[int, ...] = ()


@dataclass(frozen=True)
class RunRecord:
    arrivals: tuple[ArrivalRecord, ...]
    claimed: frozenset[int]
    welfare: float
    seed: int

    @property
    def thresholds(self) -> list[float]:
        return [a.threshold for a in self.arrivals]


@dataclass(eq=False)
class Plan:
    kind: str
    matroid: Matroid
    arena: Arena
    threshold: np.ndarray
    choice: np.ndarray
    tags: np.ndarray
    offsets: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matroid.n

    def simulate(self, trials: int, seed: int, backend: str | None = None):
        """Per-trial welfare and claimed-set bitmask."""
        return simulate_arena(self.arena, trials, seed, backend)

    def run(self, seed: int) -> RunRecord:
        a = self.arena
        U = arena_uniform_row(a, seed)
        mask = 0
        total = 0.0
        recs = []
        for i in range(self.n):
            if not a.feasible[i, mask]:
                recs.append(ArrivalRecord(math.inf, None, False, 0.0))
                continue
            c = int(a.col0[i])
            row = a.row_tie[i, mask] if U[c] < a.tie_p[i, mask] else a.row_else[i, mask]
            s = int(a.start[i, mask])
            path = [s]
            contrib = 0.0
            claimed = False
            step = 0
            while True:
                d = a.pol[row, s]
                if d >= 0:
                    contrib -= a.cost[d]
                    u = U[c + 1 + step]
                    step += 1
                    k, hi = a.tptr[d], a.tptr[d + 1]
                    while k < hi - 1 and u >= a.cdf[k]:
                        k += 1
                    s = int(a.targets[k])
                    path.append(s)
                elif d == CLAIM:
                    contrib += a.values[s]
                    claimed = True
                    break
                else:
                    break
            choice = int(self.choice[i, mask])
            if choice < 0:
                tagged = [int(self.tags[p]) for p in path if self.tags[p] >= 0]
                choice = tagged[0] if tagged else None
            thr = float(self.threshold[i, mask])
            if claimed:
                mask |= 1 << i
            total += contrib
            recs.append(ArrivalRecord(thr, choice, claimed, float(contrib), tuple(path)))
        return RunRecord(tuple(recs), to_set(mask), float(total), int(seed))


def _plan(kind, m, b: _Builder, info=None) -> Plan:
    arena = b.finish()
    return Plan(kind, m, arena, b.threshold, b.choice, np.asarray(b.tags, dtype=np.int64), info=info or {})


def _check_n(n: int):
    if n > MAX_ARRIVALS:
        raise SizeLimitError(f"plans enumerate claim sets; limited to {MAX_ARRIVALS} arrivals")


def matroid_cabinets_plan(inst: CabinetsInstance, q, z, threshold_mode: str = "auto",
                          samples: int = MC_SAMPLES, threshold_seed: int = 0) -> Plan:
    m = inst.matroid
    _check_n(inst.n)
    thr = MatroidThresholds.build(m, q, z, threshold_mode, samples, threshold_seed)
    b = _Builder(inst.n)
    for i, cab in enumerate(inst.cabinets):
        for mask in _reachable_masks(m, i):
            T = thr(i, mask)
            if math.isinf(T):
                continue
            j = cabinets_saup(cab, T).drawer
            d = cab.marginal(j)
            blk = b.block(("cab", i, j), _chance_msp(d.values, d.probs))
            r = b.row(("cab", i, j, T), blk, _claim_at_least(blk[2], T))
            b.set_arrival(i, mask, blk, r, r, 1.0, T, j)
    return _plan("cabinets", m, b, {"thresholds": thr})


def matroid_cabinets_run(inst: CabinetsInstance, q, z, threshold_mode: str = "auto", seed: int = 0, **kw) -> RunRecord:
    return matroid_cabinets_plan(inst, q, z, threshold_mode, **kw).run(seed)


def classic_reduction_plan(inst: CabinetsInstance, lambdas, classic_thresholds) -> Plan:
    """Draw drawer ``j ~ lambda_i``, open it, claim iff the value clears the
    classic threshold.  ``classic_thresholds`` is a per-arrival sequence or a
    callable ``(i, earlier_claims_mask) -> float``."""
    m = inst.matroid
    _check_n(inst.n)
    if callable(classic_thresholds):
        rule = classic_thresholds
    else:
        fixed = [float(t) for t in classic_thresholds]
        rule = lambda i, mask: fixed[i]  # noqa: E731
    b = _Builder(inst.n)
    for i, cab in enumerate(inst.cabinets):
        lam = lambdas[i]
        lam = {int(j): float(p) for j, p in (lam.items() if isinstance(lam, dict) else enumerate(lam)) if p > 0}
        if abs(sum(lam.values()) - 1.0) > 1e-9 or any(j >= cab.n_drawers for j in lam):
            raise ValueError(f"lambda for cabinet {i} is not a distribution over its drawers")
        drawers = sorted(lam)
        # root -> drawer chance nodes -> sinks
        values, acts, tags = [0.0], [None], [-1]
        root_trans = []
        for j in drawers:
            d = inst.cabinets[i].marginal(j)
            node = len(values)
            root_trans.append((node, lam[j]))
            values.append(0.0)
            acts.append(None)
            tags.append(j)
            sinks = []
            for v, p in zip(d.values, d.probs):
                sinks.append((len(values), float(p)))
                values.append(float(v))
                acts.append(())
                tags.append(j)
            acts[node] = (Action(0.0, tuple(sinks)),)
        acts[0] = (Action(0.0, tuple(root_trans)),)
        mix = MSP(tuple(values), tuple(acts), 0)
        blk = b.block(("mix", i), mix, tags)
        for mask in _reachable_masks(m, i):
            if not m.is_independent(mask | 1 << i):
                continue
            T = float(rule(i, mask))
            r = b.row(("mix", i, T), blk, _claim_at_least(mix, T))
            b.set_arrival(i, mask, blk, r, r, 1.0, T, -1)
    return _plan("classic", m, b)


def classic_reduction_run(inst: CabinetsInstance, lambdas, classic_thresholds, seed: int = 0) -> RunRecord:
    return classic_reduction_plan(inst, lambdas, classic_thresholds).run(seed)


def pandora_cabinets_plan(inst: PandoraCabinetsInstance, q, z, threshold_mode: str = "auto",
                          tie_prob: float = 1.0, samples: int = MC_SAMPLES, threshold_seed: int = 0) -> Plan:
    """Per arrival, open the drawer maximising ``E[(kappa - T)^+]`` and run its
    index policy at ``T``; an index or value equal to ``T`` counts as
    clearing it with probability ``tie_prob`` (one seeded coin per arrival)."""
    m = inst.matroid
    _check_n(inst.n)
    for i, drawers in enumerate(inst.cabinets):
        for j, d in enumerate(drawers):
            if not is_bandit(d):
                raise NotABanditError(f"cabinet {i} drawer {j} is not a bandit")
    thr = MatroidThresholds.build(m, q, z, threshold_mode, samples, threshold_seed)
    tables = [[compute_indices(d) for d in drawers] for drawers in inst.cabinets]
    b = _Builder(inst.n)
    for i, drawers in enumerate(inst.cabinets):
        for mask in _reachable_masks(m, i):
            T = thr(i, mask)
            if math.isinf(T):
                continue
            gains = [t.kappa_start.expected_excess(T) for t in tables[i]]
            j = int(np.argmax(gains))
            blk = b.block(("pc", i, j), drawers[j])
            r_tie = b.row(("pc", i, j, T, True), blk, threshold_bandit_policy(drawers[j], T, True, tables[i][j]))
            r_else = b.row(("pc", i, j, T, False), blk, threshold_bandit_policy(drawers[j], T, False, tables[i][j]))
            b.set_arrival(i, mask, blk, r_tie, r_else, tie_prob, T, j)
    return _plan("pandora", m, b, {"thresholds": thr, "tie_prob": tie_prob})


def pandora_cabinets_run(inst: PandoraCabinetsInstance, q, z, threshold_mode: str = "auto", seed: int = 0, **kw) -> RunRecord:
    return pandora_cabinets_plan(inst, q, z, threshold_mode, **kw).run(seed)


# -- the CMS pipeline -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CMSPreparation:
    eps_prime: float
    w_bar: float
    c_curve: float
    c_hat: float
    solution: ExAnteSolution
    f_hat: np.ndarray
    z_hat: np.ndarray
    q_prime: np.ndarray


def z_hat_value(f_hat: float, q: float, eps_prime: float, c: float) -> float:
    """Discounted per-claim value; zero below the ``8c/eps'`` cutoff."""
    if q <= 0 or f_hat <= 8 * c / eps_prime:
        return 0.0
    return f_hat / (q * (1 + eps_prime)) - c / q


def prepare_cms(inst: CMSInstance, eps: float, mode: str = "fptas") -> CMSPreparation:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    m = inst.matroid
    ep = eps / 4
    w_bar = max([maxsaup(p, 0.0).value for i, p in enumerate(inst.processes) if m.rank({i}) == 1], default=0.0)
    n = inst.n
    if w_bar <= 0:
        zeros = np.zeros(n)
        sol = exante_opt_cms(inst, "exact")
        return CMSPreparation(ep, 0.0, 0.0, 0.0, sol, zeros, zeros, zeros)
    c1 = ep * w_bar
    if mode == "fptas":
        sol = exante_opt_cms(inst, "fptas", c=c1, eps=ep)
    else:
        sol = exante_opt_cms(inst, "exact")
    q = sol.q
    pos = q[q > 0]
    c2 = float(ep * ep * w_bar * (pos.min() if len(pos) else 1.0) / n)
    if mode == "fptas":
        f_hat = np.array([exante_fptas_value(p, c2, ep, qi) for p, qi in zip(inst.processes, q)])
    else:
        f_hat = sol.values
    z_hat = np.array([z_hat_value(f, qi, ep, c2) for f, qi in zip(f_hat, q)])
    q_prime = np.where(z_hat > 0, q, 0.0)
    return CMSPreparation(ep, w_bar, c1, c2, sol, f_hat, z_hat, q_prime)


def exante_fptas_value(p: MSP, c: float, eps: float, q: float) -> float:
    from .exante import fptas_dag_curve

    return float(fptas_dag_curve(p, c, eps)(q))


def cms_prophet_plan(inst: CMSInstance, eps: float, mode: str = "fptas", threshold_mode: str = "auto",
                     samples: int = MC_SAMPLES, threshold_seed: int = 0) -> Plan:
    m = inst.matroid
    _check_n(inst.n)
    prep = prepare_cms(inst, eps, mode)
    thr = MatroidThresholds.build(m, prep.q_prime, prep.z_hat, threshold_mode, samples, threshold_seed)
    b = _Builder(inst.n)
    for i, proc in enumerate(inst.processes):
        blk = b.block(("cms", i), proc)
        for mask in _reachable_masks(m, i):
            T = thr(i, mask)
            if math.isinf(T):
                continue
            r = b.row(("cms", i, T), blk, maxsaup(proc, T).policy)
            b.set_arrival(i, mask, blk, r, r, 1.0, T, -1)
    return _plan("cms", m, b, {"thresholds": thr, "prep": prep})


def cms_prophet_run(inst: CMSInstance, eps: float, seed: int = 0, **kw) -> RunRecord:
    return cms_prophet_plan(inst, eps, **kw).run(seed)


# -- Monte Carlo -----------------------------------------------------------------


def estimate_welfare(runner: Plan | Callable[[int], RunRecord], trials: int, base_seed: int = 0,
                     backend: str | None = None) -> tuple[float, float]:
    """Sample mean and standard error of welfare over ``trials`` seeded runs.

    A :class:`Plan` is simulated in bulk from one stream keyed by
    ``base_seed``; any other callable is invoked with seeds
    ``base_seed, base_seed + 1, ...``.
    """
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    if isinstance(runner, Plan):
        w, _ = runner.simulate(trials, base_seed, backend)
    else:
        w = np.array([runner(base_seed + k).welfare for k in range(trials)])
    return float(w.mean()), float(w.std(ddof=1) / np.sqrt(trials))
