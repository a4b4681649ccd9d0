"""Randomized pipage rounding over a matroid given by its rank table.

One step on a fractional point ``q``:

* if some fractional ``i`` lies in no tight set, move along ``e_i``: up by
  ``up_i`` (largest feasible increase) or down to ``q_i = 0``;
* otherwise take the tight set of least size (then least bitmask) holding a
  fractional element, and its two lowest fractional elements ``i < j``, and
  move along ``e_i - e_j`` as far as feasibility allows either way.

The direction is picked so the mean is preserved.  The numpy and numba
versions do the same floating point operations in the same order.
"""

from __future__ import annotations

import numpy as np

from .._config import TOL

INF = np.inf


def max_rounds(n: int) -> int:
    return 8 * n + 16


def _membership(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[None, :] >> np.arange(n)[:, None]) & 1).astype(bool)


def _size_order(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = ((masks[:, None] >> np.arange(n)[None, :]) & 1).sum(axis=1)
    return np.lexsort((masks, sizes))


def pipage_step_numpy(q: np.ndarray, ranks: np.ndarray, tol: float = TOL):
    """One step for every row of ``q`` (each must be fractional somewhere).

    Returns ``(i, j, d_plus, d_minus)``; ``j == -1`` means a move along
    ``e_i`` alone.  Moving up has probability ``d_minus / (d_plus + d_minus)``.
    """
    N, n = q.shape
    member = _membership(n)
    qsum = np.zeros((N, 1 << n))
    for i in range(n):
        qsum += q[:, i:i + 1] * member[i][None, :]
    slack = ranks[None, :] - qsum
    frac = (q > tol) & (q < 1 - tol)

    up = np.empty((N, n))
    for i in range(n):
        up[:, i] = np.minimum(1.0 - q[:, i], np.where(member[i][None, :], slack, INF).min(axis=1))
    single = frac & (up > tol)
    has_single = single.any(axis=1)

    ii = np.full(N, -1, dtype=np.int64)
    jj = np.full(N, -1, dtype=np.int64)
    dplus = np.zeros(N)
    dminus = np.zeros(N)

    rows = np.flatnonzero(has_single)
    if len(rows):
        first = np.argmax(single[rows], axis=1)
        ii[rows] = first
        dplus[rows] = up[rows, first]
        dminus[rows] = q[rows, first]

    rows = np.flatnonzero(~has_single)
    if len(rows):
        order = _size_order(n)
        fmask = (frac[rows].astype(np.int64) << np.arange(n)[None, :]).sum(axis=1)
        masks = np.arange(1 << n, dtype=np.int64)
        cand = (slack[rows] <= tol) & ((masks[None, :] & fmask[:, None]) != 0)
        cand = cand[:, order]
        if not cand.any(axis=1).all():
            raise RuntimeError("pipage rounding found no tight set with a fractional element")
        tmask = order[np.argmax(cand, axis=1)]
        both = frac[rows] & member[:, tmask].T
        i_sel = np.argmax(both, axis=1)
        both[np.arange(len(rows)), i_sel] = False
        if not both.any(axis=1).all():
            raise RuntimeError("tight set holds a single fractional element")
        j_sel = np.argmax(both, axis=1)
        ii[rows] = i_sel
        jj[rows] = j_sel
        sl = slack[rows]
        mi = member[i_sel]
        mj = member[j_sel]
        qi = q[rows, i_sel]
        qj = q[rows, j_sel]
        plus_lim = np.where(mi & ~mj, sl, INF).min(axis=1)
        minus_lim = np.where(mj & ~mi, sl, INF).min(axis=1)
        dplus[rows] = np.minimum(np.minimum(1.0 - qi, qj), plus_lim)
        dminus[rows] = np.minimum(np.minimum(qi, 1.0 - qj), minus_lim)
    return ii, jj, dplus, dminus


def _apply_snap(q: np.ndarray, tol: float) -> None:
    q[q < tol] = 0.0
    q[q > 1 - tol] = 1.0


def pipage_batch_numpy(q0: np.ndarray, ranks: np.ndarray, U: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Round ``len(U)`` copies of ``q0``; row ``k`` uses draws ``U[k]``."""
    N = U.shape[0]
    n = len(q0)
    q = np.repeat(q0[None, :], N, axis=0)
    _apply_snap(q, tol)
    for step in range(U.shape[1]):
        frac = ((q > 0) & (q < 1)).any(axis=1)
        rows = np.flatnonzero(frac)
        if len(rows) == 0:
            break
        sub = q[rows]
        ii, jj, dp, dm = pipage_step_numpy(sub, ranks, tol)
        go_up = U[rows, step] * (dp + dm) < dm
        delta = np.where(go_up, dp, -dm)
        r = np.arange(len(rows))
        sub[r, ii] += delta
        pair = jj >= 0
        sub[r[pair], jj[pair]] -= delta[pair]
        _apply_snap(sub, tol)
        q[rows] = sub
    else:
        if ((q > 0) & (q < 1)).any():
            raise RuntimeError("pipage rounding did not terminate")
    bits = (q >= 1).astype(np.int64) << np.arange(n)[None, :]
    return bits.sum(axis=1)
