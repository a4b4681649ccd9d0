"""Ex-ante relaxation: per-arrival value curves and their joint maximisation
over the matroid polytope.

A curve ``f`` maps a claim probability ``q`` to the largest expected
contribution (value claimed minus costs) of any policy that claims with
probability exactly ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import TOL, SizeLimitError
from .matroid import Matroid
from .model import MSP, Cabinet, CabinetsInstance, CMSInstance, DiscreteDistribution
from .plconcave import (
    PLConcave,
    concave_envelope,
    iron,
    theta_grid,
    upper_expectation,
    upper_hull,
    weighted_sup_convolution,
)

BREAKPOINT_BUDGET = 100_000


# -- cabinets -------------------------------------------------------------------


@dataclass(frozen=True)
class CabinetWitness:
    """Hull vertices of a cabinet curve and the drawer each came from."""

    xs: np.ndarray
    ys: np.ndarray
    drawer: np.ndarray

    def at(self, q: float) -> tuple[dict[int, float], dict[int, float]]:
        """``(lambda, quantiles)``: drawer mixture and per-drawer claim
        probability whose value is the curve at ``q``."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q={q} outside [0, 1]")
        k = int(np.searchsorted(self.xs, q, side="right")) - 1
        k = min(max(k, 0), len(self.xs) - 2)
        xa, xb = self.xs[k], self.xs[k + 1]
        ja, jb = int(self.drawer[k]), int(self.drawer[k + 1])
        if ja == jb or q == xb or q == xa:
            j = jb if (q == xb and ja != jb) else ja
            return {j: 1.0}, {j: float(q)}
        lam_a = (xb - q) / (xb - xa)
        return {ja: float(lam_a), jb: float(1.0 - lam_a)}, {ja: float(xa), jb: float(xb)}


def cabinet_value_curve(cabinet: Cabinet) -> tuple[PLConcave, CabinetWitness]:
    gs = [upper_expectation(cabinet.marginal(j)) for j in range(cabinet.n_drawers)]
    xs = np.concatenate([g.xs for g in gs])
    ys = np.concatenate([g.ys for g in gs])
    src = np.concatenate([np.full(len(g.xs), j) for j, g in enumerate(gs)])
    hx, hy, idx = upper_hull(xs, ys)
    curve = PLConcave(hx, hy, check=False)
    return curve, CabinetWitness(hx, hy, src[idx])


def quantile_threshold(d: DiscreteDistribution, q: float) -> tuple[float, float]:
    """Threshold ``t`` and tie probability ``p`` such that claiming when
    ``X > t``, or ``X == t`` with probability ``p``, claims with probability ``q``."""
    if q <= 0:
        return np.inf, 0.0
    vals, probs = d.values[::-1], d.probs[::-1]
    above = 0.0
    for v, p in zip(vals, probs):
        if above + p >= q - TOL:
            return float(v), float(min(1.0, max(0.0, (q - above) / p)))
        above += p
    return float(vals[-1]), 1.0


# -- MSP curves -----------------------------------------------------------------


def exact_dag_curve(m: MSP, budget: int = BREAKPOINT_BUDGET) -> PLConcave:
    g: dict[int, PLConcave] = {}
    used = 0
    zero = PLConcave.zero()
    reach = m.reachable
    for s in reversed(m.topological_order):
        if s not in reach:
            continue
        if m.is_sink(s):
            g[s] = PLConcave.linear(m.values[s])
            continue
        opts = [zero]
        for a in m.actions[s]:
            parts = [(p, g[t]) for t, p in a.transitions if p > 0]
            opts.append(weighted_sup_convolution(parts).shift(a.cost))
        g[s] = concave_envelope(opts)
        used += len(g[s])
        if used > budget:
            raise SizeLimitError(f"exact curve exceeded {budget} breakpoints; use the FPTAS")
    return g[m.start]


def fptas_dag_curve(m: MSP, c: float, eps: float) -> PLConcave:
    """Grid approximation with additive error ``c`` and multiplicative ``1+eps``."""
    if not c > 0 or not 0 < eps < 1:
        raise ValueError("need c > 0 and eps in (0, 1)")
    vmax = m.max_value
    if vmax <= 0:
        return PLConcave.zero()
    b = c / vmax
    alpha = eps / (2 * m.n_states)
    grid = theta_grid(b, alpha)
    cap = b * vmax
    zero = PLConcave.zero()
    g: dict[int, PLConcave] = {}
    reach = m.reachable
    for s in reversed(m.topological_order):
        if s not in reach:
            continue
        if m.is_sink(s):
            g[s] = PLConcave.linear(m.values[s])
            continue
        opts = [zero]
        for a in m.actions[s]:
            parts = [(p, g[t]) for t, p in a.transitions if p > 0]
            conv = weighted_sup_convolution(parts)
            ga = iron(conv(grid), grid, cap, b)
            opts.append(ga.shift(a.cost))
        env = concave_envelope(opts)
        g[s] = iron(env(grid), grid, cap, b)
    return g[m.start]


# -- joint optimisation -----------------------------------------------------------


def maximize_separable_concave(m: Matroid, curves, tol: float = TOL) -> np.ndarray:
    """Maximise ``sum_i f_i(q_i)`` over the matroid polytope.

    Pieces of all curves are taken in order of decreasing slope and each is
    filled as far as the tightest rank constraint through its coordinate
    allows; for concave pieces over a polymatroid this greedy is optimal.
    """
    if len(curves) != m.n:
        raise ValueError(f"{len(curves)} curves for {m.n} elements")
    n = m.n
    slack = m.rank_table.astype(float).copy()
    masks = np.arange(1 << n, dtype=np.int64)
    member = [((masks >> i) & 1).astype(bool) for i in range(n)]
    pieces = []
    for i, f in enumerate(curves):
        for k, (sl, w) in enumerate(zip(f.slopes, f.widths)):
            pieces.append((-sl, i, k, w))
    pieces.sort()
    q = np.zeros(n)
    for neg_slope, i, _, w in pieces:
        if -neg_slope <= tol:
            break
        room = min(w, 1.0 - q[i], slack[member[i]].min())
        if room <= 0:
            continue
        q[i] += room
        slack[member[i]] -= room
    return np.clip(q, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class ExAnteSolution:
    q: np.ndarray
    curves: list
    z: np.ndarray
    objective: float
    lambdas: list | None = None
    quantiles: list | None = None
    mode: str = "exact"
    extra: dict = field(default_factory=dict)

    @property
    def values(self) -> np.ndarray:
        return np.array([f(qi) for f, qi in zip(self.curves, self.q)])


def _solution(matroid: Matroid, curves, **kw) -> ExAnteSolution:
    q = maximize_separable_concave(matroid, curves)
    vals = np.array([f(qi) for f, qi in zip(curves, q)])
    z = np.where(q > 0, vals / np.where(q > 0, q, 1.0), 0.0)
    return ExAnteSolution(q=q, curves=list(curves), z=z, objective=float(vals.sum()), **kw)


def exante_opt_cabinets(inst: CabinetsInstance) -> ExAnteSolution:
    built = [cabinet_value_curve(c) for c in inst.cabinets]
    sol = _solution(inst.matroid, [f for f, _ in built])
    lambdas, quants = [], []
    for (_, wit), qi in zip(built, sol.q):
        lam, qu = wit.at(float(qi))
        lambdas.append(lam)
        quants.append(qu)
    return ExAnteSolution(sol.q, sol.curves, sol.z, sol.objective, lambdas, quants, mode="cabinets")


def exante_opt_cms(inst: CMSInstance, mode: str = "exact", c: float | None = None,
                   eps: float | None = None, budget: int = BREAKPOINT_BUDGET) -> ExAnteSolution:
    if mode == "exact":
        curves = [exact_dag_curve(p, budget) for p in inst.processes]
    elif mode == "fptas":
        if c is None or eps is None:
            raise ValueError("fptas mode needs c and eps")
        curves = [fptas_dag_curve(p, c, eps) for p in inst.processes]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _solution(inst.matroid, curves, mode=mode, extra={"c": c, "eps": eps})


def kappa_cabinet(drawers, budget: int = 100_000) -> Cabinet:
    """Cabinet whose drawer ``j`` holds the capped value of bandit ``j``."""
    from .indices import compute_indices

    return Cabinet.independent([compute_indices(d).kappa_start for d in drawers], budget)


def exante_opt_pandora_cabinets(inst) -> ExAnteSolution:
    """Ex-ante solution of the capped-value cabinets standing in for ``inst``."""
    cabs = tuple(kappa_cabinet(d) for d in inst.cabinets)
    return exante_opt_cabinets(CabinetsInstance(cabs, inst.matroid))
