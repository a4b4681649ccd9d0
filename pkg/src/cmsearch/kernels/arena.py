"""Flattened arena of search processes and its numpy simulator.

All states of all arrivals live in one global numbering.  Actions are stored
CSR-style: action ``d`` moves to ``targets[tptr[d] + k]`` where ``k`` is the
first index with ``u < cdf[tptr[d] + k]`` (the last entry is taken when none
matches).  ``pol[row, s]`` is an action index, ``NOCLAIM`` or ``CLAIM``.

For arrival ``i`` facing earlier-claims bitmask ``mask``: it is skipped
unless ``feasible[i, mask]``; column ``col0[i]`` of the uniform row is the
tie coin choosing ``row_tie`` (when ``u < tie_p``) or ``row_else``, and the
following columns feed the transitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NOCLAIM = -1
CLAIM = -2


@dataclass
class Arena:
    values: np.ndarray
    cost: np.ndarray
    tptr: np.ndarray
    targets: np.ndarray
    cdf: np.ndarray
    pol: np.ndarray
    feasible: np.ndarray
    tie_p: np.ndarray
    row_tie: np.ndarray
    row_else: np.ndarray
    start: np.ndarray
    col0: np.ndarray
    n_cols: int

    def arrays(self):
        return (self.values, self.cost, self.tptr, self.targets, self.cdf, self.pol, self.feasible,
                self.tie_p, self.row_tie, self.row_else, self.start, self.col0)


def arena_simulate_numpy(U, values, cost, tptr, targets, cdf, pol, feasible, tie_p, row_tie, row_else, start, col0):
    N = U.shape[0]
    n = col0.shape[0]
    welfare = np.zeros(N)
    mask = np.zeros(N, dtype=np.int64)
    for i in range(n):
        live = feasible[i, mask]
        c = col0[i]
        coin = U[:, c] < tie_p[i, mask]
        row = np.where(coin, row_tie[i, mask], row_else[i, mask])
        s = start[i, mask]
        step = 0
        while live.any():
            d = np.where(live, pol[row, s], NOCLAIM)
            claim = live & (d == CLAIM)
            welfare[claim] += values[s[claim]]
            mask[claim] |= 1 << i
            adv = live & (d >= 0)
            if not adv.any():
                break
            da = d[adv]
            welfare[adv] -= cost[da]
            u = U[adv, c + 1 + step]
            k = tptr[da].copy()
            hi = tptr[da + 1]
            while True:
                move = (k < hi - 1) & (u >= cdf[k])
                if not move.any():
                    break
                k[move] += 1
            s = s.copy()
            s[adv] = targets[k]
            live = adv
            step += 1
    return welfare, mask
