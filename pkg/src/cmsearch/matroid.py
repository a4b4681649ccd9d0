"""Matroid oracles, the matroid polytope and marginal-preserving rounding.

Elements are ``0 .. n-1``; subsets are passed as iterables of elements or as
integer bitmasks (bit ``i`` set iff element ``i`` is present) and returned
as ``frozenset``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ._config import TOL, SizeLimitError

ENUM_BUDGET = 20
EXPLICIT_BUDGET = 12


def to_mask(s) -> int:
    if isinstance(s, (int, np.integer)):
        return int(s)
    out = 0
    for i in s:
        out |= 1 << int(i)
    return out


def to_set(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def popcount(masks: np.ndarray) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(masks).astype(np.int64)
    out = np.zeros_like(masks)
    m = masks.copy()
    while m.any():
        out += m & 1
        m >>= 1
    return out


class Matroid:
    """A matroid given by kind: ``uniform``, ``partition`` or ``explicit``.

    Use the :meth:`uniform`, :meth:`partition` and :meth:`explicit`
    constructors rather than ``__init__``.
    """

    def __init__(self, n: int, kind: str, k: int | None = None,
                 blocks: Sequence[Sequence[int]] | None = None, caps: Sequence[int] | None = None,
                 independent: Iterable[Iterable[int]] | None = None):
        self.n = int(n)
        self.kind = kind
        self.k = k
        self.blocks = None if blocks is None else tuple(tuple(int(e) for e in b) for b in blocks)
        self.caps = None if caps is None else tuple(int(c) for c in caps)
        self._indep_masks = None if independent is None else frozenset(to_mask(s) for s in independent)

    @classmethod
    def uniform(cls, n: int, k: int) -> "Matroid":
        if k < 0:
            raise ValueError("rank must be nonnegative")
        return cls(n, "uniform", k=k)

    @classmethod
    def partition(cls, blocks: Sequence[Sequence[int]], caps: Sequence[int]) -> "Matroid":
        if len(blocks) != len(caps):
            raise ValueError("one capacity per block")
        elems = sorted(e for b in blocks for e in b)
        if elems != list(range(len(elems))):
            raise ValueError("blocks must partition 0..n-1")
        if any(c < 0 for c in caps):
            raise ValueError("capacities must be nonnegative")
        return cls(len(elems), "partition", blocks=blocks, caps=caps)

    @classmethod
    def explicit(cls, n: int, independent: Iterable[Iterable[int]]) -> "Matroid":
        if n > EXPLICIT_BUDGET:
            raise SizeLimitError(f"explicit matroids are limited to n <= {EXPLICIT_BUDGET}")
        m = cls(n, "explicit", independent=independent)
        problems = m.axiom_violations()
        if problems:
            raise ValueError("; ".join(problems))
        return m

    def axiom_violations(self) -> list[str]:
        indep = self._indep_masks
        out = []
        if 0 not in indep:
            out.append("empty set must be independent")
        full = (1 << self.n) - 1
        for s in indep:
            if s & ~full:
                out.append(f"set {sorted(to_set(s))} uses elements outside 0..{self.n - 1}")
                continue
            for i in range(self.n):
                if s >> i & 1 and (s & ~(1 << i)) not in indep:
                    out.append(f"not downward closed at {sorted(to_set(s))}")
                    break
        if out:
            return out
        for a in indep:
            for b in indep:
                if bin(a).count("1") > bin(b).count("1"):
                    diff = a & ~b
                    if not any(diff >> i & 1 and (b | 1 << i) in indep for i in range(self.n)):
                        out.append(f"exchange fails for {sorted(to_set(a))}, {sorted(to_set(b))}")
                        return out
        return out

    # -- oracles ---------------------------------------------------------

    def is_independent(self, s) -> bool:
        mask = to_mask(s)
        if self.kind == "uniform":
            return bin(mask).count("1") <= self.k
        if self.kind == "partition":
            return all(sum(mask >> e & 1 for e in b) <= c for b, c in zip(self.blocks, self.caps))
        return mask in self._indep_masks

    def rank(self, s) -> int:
        """Size of a maximal independent subset, found greedily."""
        mask = to_mask(s)
        if self.kind == "uniform":
            return min(bin(mask).count("1"), self.k)
        if self.kind == "partition":
            return sum(min(sum(mask >> e & 1 for e in b), c) for b, c in zip(self.blocks, self.caps))
        cur = 0
        for i in range(self.n):
            if mask >> i & 1 and self.is_independent(cur | 1 << i):
                cur |= 1 << i
        return bin(cur).count("1")

    @cached_property
    def rank_table(self) -> np.ndarray:
        """``rank`` of every subset, indexed by bitmask (``n <= 20``)."""
        if self.n > ENUM_BUDGET:
            raise SizeLimitError(f"subset enumeration limited to n <= {ENUM_BUDGET}")
        masks = np.arange(1 << self.n, dtype=np.int64)
        if self.kind == "uniform":
            return np.minimum(popcount(masks), self.k)
        if self.kind == "partition":
            out = np.zeros(len(masks), dtype=np.int64)
            for b, c in zip(self.blocks, self.caps):
                bm = to_mask(b)
                out += np.minimum(popcount(masks & bm), c)
            return out
        out = np.zeros(len(masks), dtype=np.int64)
        for mask in range(1, 1 << self.n):
            if mask in self._indep_masks:
                out[mask] = bin(mask).count("1")
            else:
                out[mask] = max(out[mask & ~(1 << i)] for i in range(self.n) if mask >> i & 1)
        return out

    @cached_property
    def independent_table(self) -> np.ndarray:
        return self.rank_table == popcount(np.arange(1 << self.n))

    def independent_sets(self) -> list[frozenset[int]]:
        return [to_set(int(m)) for m in np.flatnonzero(self.independent_table)]

    def __repr__(self) -> str:
        if self.kind == "uniform":
            return f"Matroid.uniform(n={self.n}, k={self.k})"
        if self.kind == "partition":
            return f"Matroid.partition({list(map(list, self.blocks))}, {list(self.caps)})"
        return f"Matroid.explicit(n={self.n}, {len(self._indep_masks)} independent sets)"


def rank(m: Matroid, s) -> int:
    return m.rank(s)


def subset_sums(q: np.ndarray) -> np.ndarray:
    """``q(S)`` for every bitmask ``S``, accumulated in ascending element order."""
    n = len(q)
    masks = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n)
    for i in range(n):
        out += q[i] * ((masks >> i) & 1)
    return out


def polytope_member(m: Matroid, q, tol: float = TOL):
    """``True`` if ``q`` lies in the matroid polytope, else a violated subset.

    Coordinate bound violations return the offending singleton; otherwise
    the subset maximising ``q(S) - rank(S)`` is returned.
    """
    q = np.asarray(q, dtype=float)
    if len(q) != m.n:
        raise ValueError(f"point has {len(q)} coordinates, matroid has {m.n} elements")
    for i, x in enumerate(q):
        if x < -tol or x > 1 + tol:
            return frozenset({i})
    excess = subset_sums(q) - m.rank_table
    worst = int(np.argmax(excess))
    if excess[worst] > tol:
        return to_set(worst)
    return True


def max_weight_independent(m: Matroid, w) -> frozenset[int]:
    """Greedy maximum-weight independent set; ties go to the lower index."""
    w = np.asarray(w, dtype=float)
    order = sorted(range(m.n), key=lambda i: (-w[i], i))
    cur = 0
    for i in order:
        if w[i] <= 0:
            break
        if m.is_independent(cur | 1 << i):
            cur |= 1 << i
    return to_set(cur)


def remaining_value(m: Matroid, z, f_set, s_set) -> float:
    """Best total ``z`` addable to ``S`` using only elements of ``F \\ S``."""
    z = np.asarray(z, dtype=float)
    fm, sm = to_mask(f_set), to_mask(s_set)
    if not m.is_independent(sm):
        raise ValueError("S must be independent")
    return _remaining(m, z, fm, sm)


def _remaining(m: Matroid, z: np.ndarray, fmask: int, smask: int) -> float:
    cand = [i for i in range(m.n) if fmask >> i & 1 and not smask >> i & 1 and z[i] > 0]
    cand.sort(key=lambda i: (-z[i], i))
    cur = smask
    total = 0.0
    for i in cand:
        if m.is_independent(cur | 1 << i):
            cur |= 1 << i
            total += z[i]
    return total


def _check_feasible(m: Matroid, q: np.ndarray) -> None:
    res = polytope_member(m, q)
    if res is not True:
        raise ValueError(f"point is outside the matroid polytope (violated set {sorted(res)})")


def sample_feasible_sets(m: Matroid, q, n_samples: int, seed: int, backend: str | None = None) -> np.ndarray:
    """``n_samples`` independent sets (as bitmasks) with ``Pr[i in F] = q_i``."""
    from .kernels import pipage_sample

    q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
    _check_feasible(m, q)
    return pipage_sample(m.rank_table.astype(np.float64), q, int(n_samples), seed, backend)


def sample_feasible_set(m: Matroid, q, seed: int, backend: str | None = None) -> frozenset[int]:
    """One randomized-pipage rounding of ``q`` to an independent set."""
    return to_set(int(sample_feasible_sets(m, q, 1, seed, backend)[0]))


def exact_dq(m: Matroid, q, prune: float = 1e-12, max_points: int = 200_000) -> list[tuple[float, frozenset[int]]]:
    """Explicit convex decomposition of ``q`` over independent sets.

    Runs pipage rounding keeping both branches with their probabilities;
    identical intermediate points are merged.  Sets are returned in
    ascending bitmask order.
    """
    from .kernels.pipage import pipage_step_numpy

    if m.n > EXPLICIT_BUDGET:
        raise SizeLimitError(f"exact decomposition limited to n <= {EXPLICIT_BUDGET}")
    q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
    _check_feasible(m, q)
    ranks = m.rank_table.astype(np.float64)
    q = _snap(q)
    pending = {tuple(q): 1.0}
    done: dict[int, float] = {}
    rounds = 0
    while pending:
        rounds += 1
        if rounds > 16 * m.n + 64:
            raise RuntimeError("pipage rounding did not terminate")
        keys = list(pending)
        pts = np.array(keys, dtype=float).reshape(len(keys), m.n)
        wts = np.array([pending[k] for k in keys])
        pending = {}
        integral = ((pts <= 0) | (pts >= 1)).all(axis=1)
        for row in np.flatnonzero(integral):
            mask = int(sum(1 << i for i in range(m.n) if pts[row, i] >= 1))
            done[mask] = done.get(mask, 0.0) + wts[row]
        frac_rows = np.flatnonzero(~integral)
        if len(frac_rows) == 0:
            break
        sub = pts[frac_rows]
        ii, jj, dplus, dminus = pipage_step_numpy(sub, ranks)
        p_up = dminus / (dplus + dminus)
        for k, row in enumerate(frac_rows):
            for sign, prob in ((1.0, p_up[k]), (-1.0, 1.0 - p_up[k])):
                w = wts[row] * prob
                if w <= prune:
                    continue
                nq = sub[k].copy()
                step = dplus[k] if sign > 0 else dminus[k]
                nq[ii[k]] += sign * step
                if jj[k] >= 0:
                    nq[jj[k]] -= sign * step
                key = tuple(_snap(nq))
                pending[key] = pending.get(key, 0.0) + w
        if len(pending) > max_points:
            raise SizeLimitError(f"decomposition exceeded {max_points} intermediate points")
    total = sum(done.values())
    return [(float(w / total), to_set(mask)) for mask, w in sorted(done.items())]


def _snap(q: np.ndarray, tol: float = TOL) -> np.ndarray:
    q = q.copy()
    q[q < tol] = 0.0
    q[q > 1 - tol] = 1.0
    return q


def decomposition_marginals(n: int, dq) -> np.ndarray:
    out = np.zeros(n)
    for p, s in dq:
        for i in s:
            out[i] += p
    return out
