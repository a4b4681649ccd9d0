"""Compiled versions of the batch kernels (serial loops over trials)."""

from __future__ import annotations

import numpy as np
from numba import njit

from .._config import TOL

INF = np.inf


@njit(cache=True)
def pipage_batch(q0, ranks, U, tol=TOL):
    N = U.shape[0]
    n = q0.shape[0]
    K = 1 << n
    out = np.zeros(N, dtype=np.int64)
    qsum = np.empty(K)
    slack = np.empty(K)
    up = np.empty(n)
    sizes = np.zeros(K, dtype=np.int64)
    for m in range(K):
        c = 0
        for i in range(n):
            c += (m >> i) & 1
        sizes[m] = c
    q = np.empty(n)
    for t in range(N):
        for i in range(n):
            x = q0[i]
            if x < tol:
                x = 0.0
            elif x > 1 - tol:
                x = 1.0
            q[i] = x
        finished = False
        for step in range(U.shape[1]):
            anyfrac = False
            for i in range(n):
                if q[i] > 0 and q[i] < 1:
                    anyfrac = True
            if not anyfrac:
                finished = True
                break
            for m in range(K):
                acc = 0.0
                for i in range(n):
                    if (m >> i) & 1:
                        acc += q[i] * 1.0
                    else:
                        acc += q[i] * 0.0
                qsum[m] = acc
                slack[m] = ranks[m] - acc
            ii = -1
            jj = -1
            dp = 0.0
            dm = 0.0
            for i in range(n):
                lim = INF
                for m in range(K):
                    if (m >> i) & 1 and slack[m] < lim:
                        lim = slack[m]
                up[i] = min(1.0 - q[i], lim)
            for i in range(n):
                if q[i] > tol and q[i] < 1 - tol and up[i] > tol:
                    ii = i
                    dp = up[i]
                    dm = q[i]
                    break
            if ii < 0:
                fmask = 0
                for i in range(n):
                    if q[i] > tol and q[i] < 1 - tol:
                        fmask |= 1 << i
                best = -1
                for m in range(K):
                    if slack[m] <= tol and (m & fmask) != 0:
                        if best < 0 or sizes[m] < sizes[best]:
                            best = m
                if best < 0:
                    raise RuntimeError("pipage rounding found no tight set with a fractional element")
                both = best & fmask
                for i in range(n):
                    if (both >> i) & 1:
                        if ii < 0:
                            ii = i
                        elif jj < 0:
                            jj = i
                if jj < 0:
                    raise RuntimeError("tight set holds a single fractional element")
                plus_lim = INF
                minus_lim = INF
                for m in range(K):
                    a = (m >> ii) & 1
                    b = (m >> jj) & 1
                    if a == 1 and b == 0 and slack[m] < plus_lim:
                        plus_lim = slack[m]
                    if b == 1 and a == 0 and slack[m] < minus_lim:
                        minus_lim = slack[m]
                dp = min(min(1.0 - q[ii], q[jj]), plus_lim)
                dm = min(min(q[ii], 1.0 - q[jj]), minus_lim)
            if U[t, step] * (dp + dm) < dm:
                delta = dp
            else:
                delta = -dm
            q[ii] += delta
            if jj >= 0:
                q[jj] -= delta
            for i in range(n):
                if q[i] < tol:
                    q[i] = 0.0
                elif q[i] > 1 - tol:
                    q[i] = 1.0
        if not finished:
            for i in range(n):
                if q[i] > 0 and q[i] < 1:
                    raise RuntimeError("pipage rounding did not terminate")
        mask = 0
        for i in range(n):
            if q[i] >= 1:
                mask |= 1 << i
        out[t] = mask
    return out


@njit(cache=True)
def arena_simulate(U, values, cost, tptr, targets, cdf, pol, feasible, tie_p, row_tie, row_else, start, col0):
    N = U.shape[0]
    n = col0.shape[0]
    welfare = np.zeros(N)
    chosen = np.zeros(N, dtype=np.int64)
    for t in range(N):
        mask = 0
        w = 0.0
        for i in range(n):
            if not feasible[i, mask]:
                continue
            c = col0[i]
            if U[t, c] < tie_p[i, mask]:
                row = row_tie[i, mask]
            else:
                row = row_else[i, mask]
            s = start[i, mask]
            step = 0
            while True:
                d = pol[row, s]
                if d >= 0:
                    w -= cost[d]
                    u = U[t, c + 1 + step]
                    step += 1
                    k = tptr[d]
                    hi = tptr[d + 1]
                    while k < hi - 1 and u >= cdf[k]:
                        k += 1
                    s = targets[k]
                elif d == -2:
                    w += values[s]
                    mask |= 1 << i
                    break
                else:
                    break
        welfare[t] = w
        chosen[t] = mask
    return welfare, chosen
