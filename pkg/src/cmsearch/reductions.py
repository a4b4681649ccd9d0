"""Instance conversions that preserve the optimal welfare."""

from __future__ import annotations

import math

from .matroid import Matroid
from .model import MSP, Action, CMSInstance, NOIPandoraInstance, PandoraCabinetsInstance


def convert_noi_to_cabinets(inst: NOIPandoraInstance) -> PandoraCabinetsInstance:
    """Each box becomes a cabinet with an inspect drawer and a take-unseen drawer."""
    cabinets = []
    for c, d in inst.boxes:
        if not c > 0:
            raise ValueError("inspection costs must be positive")
        k = len(d)
        inspect = MSP.build(
            [0.0] + [float(v) for v in d.values],
            [[(c, [(t + 1, float(p)) for t, p in enumerate(d.probs)])]] + [[]] * k,
        )
        cabinets.append((inspect, MSP.sink(d.mean())))
    return PandoraCabinetsInstance(tuple(cabinets), Matroid.uniform(len(cabinets), 1))


def _first_cost(d: MSP) -> float:
    return math.inf if d.is_sink(d.start) else min(a.cost for a in d.actions[d.start])


def max_shift(inst: PandoraCabinetsInstance) -> float:
    """The shift must stay below every drawer's first advance cost."""
    return min((_first_cost(d) for ds in inst.cabinets for d in ds), default=math.inf)


def convert_cabinets_to_cms(inst: PandoraCabinetsInstance, eps: float) -> CMSInstance:
    """One process per cabinet: a selection step of cost ``eps`` into the
    chosen drawer, whose first step is made ``eps`` cheaper (or whose value is
    raised by ``eps`` when it is a sink)."""
    limit = max_shift(inst)
    if not 0 < eps < limit:
        raise ValueError(f"eps must lie in (0, {limit})")
    procs = []
    for drawers in inst.cabinets:
        values = [0.0]
        actions: list[tuple[Action, ...]] = [()]
        select = []
        for d in drawers:
            off = len(values)
            for s in range(d.n_states):
                v = d.values[s]
                acts = tuple(Action(a.cost, tuple((off + t, p) for t, p in a.transitions)) for a in d.actions[s])
                if s == d.start:
                    if d.is_sink(s):
                        v = v + eps
                    else:
                        acts = tuple(Action(a.cost - eps, a.transitions) for a in acts)
                values.append(v)
                actions.append(acts)
            select.append(Action(eps, ((off + d.start, 1.0),)))
        actions[0] = tuple(select)
        procs.append(MSP(tuple(values), tuple(actions), 0))
    return CMSInstance(tuple(procs), inst.matroid)
