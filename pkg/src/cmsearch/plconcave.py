"""Piecewise-linear concave functions on [0, 1].

A :class:`PLConcave` stores its breakpoints ``xs`` (strictly increasing,
``xs[0] == 0`` and ``xs[-1] == 1``) and the values ``ys`` there; between
breakpoints it is the linear interpolant.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ._config import SLOPE_MERGE_TOL, TOL
from .model import DiscreteDistribution


class PLConcave:
    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys, check: bool = True):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
            raise ValueError("need matching 1-d breakpoint and value arrays with at least two entries")
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if not (np.diff(xs) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")
        self.xs, self.ys = _merge_collinear(xs, ys)
        if check and not self.is_concave():
            raise ValueError("slopes are not nonincreasing")

    @classmethod
    def linear(cls, slope: float, intercept: float = 0.0) -> "PLConcave":
        return cls([0.0, 1.0], [intercept, intercept + slope])

    @classmethod
    def zero(cls) -> "PLConcave":
        return cls.linear(0.0)

    @classmethod
    def from_segments(cls, y0: float, slopes, widths) -> "PLConcave":
        """Build from a start value and consecutive (slope, width) pieces."""
        slopes = np.asarray(slopes, dtype=float)
        widths = np.asarray(widths, dtype=float)
        keep = widths > 0
        slopes, widths = slopes[keep], widths[keep]
        xs = np.concatenate([[0.0], np.cumsum(widths)])
        ys = np.concatenate([[y0], y0 + np.cumsum(slopes * widths)])
        xs[-1] = 1.0
        xs, ys = _dedupe_x(xs, ys)
        return cls(xs, ys, check=False)

    # -- queries ---------------------------------------------------------

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.ys) / np.diff(self.xs)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.xs)

    def __len__(self) -> int:
        return len(self.xs)

    def is_concave(self, tol: float = TOL) -> bool:
        return bool((np.diff(self.slopes) <= tol).all())

    def is_nondecreasing(self, tol: float = TOL) -> bool:
        return bool((self.slopes >= -tol).all())

    def evaluate(self, q):
        q_arr = np.asarray(q, dtype=float)
        if ((q_arr < 0) | (q_arr > 1)).any():
            raise ValueError(f"q={q} outside [0, 1]")
        out = np.interp(q_arr, self.xs, self.ys)
        return float(out) if np.ndim(q) == 0 else out

    __call__ = evaluate

    def supergradient(self, q: float) -> float:
        """Right slope at ``q`` (left slope at ``q == 1``)."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"q={q} outside [0, 1]")
        k = int(np.searchsorted(self.xs, q, side="right")) - 1
        k = min(max(k, 0), len(self.xs) - 2)
        return float(self.slopes[k])

    def shift(self, delta: float) -> "PLConcave":
        return PLConcave(self.xs, self.ys - delta, check=False)

    def max_abs_diff(self, other: "PLConcave") -> float:
        grid = np.union1d(self.xs, other.xs)
        return float(np.max(np.abs(self(grid) - other(grid))))

    def __repr__(self) -> str:
        pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in zip(self.xs, self.ys))
        return f"PLConcave[{pts}]"


def _dedupe_x(xs, ys):
    keep = np.concatenate([[True], np.diff(xs) > 1e-15])
    keep[-1] = True
    xs, ys = xs[keep], ys[keep]
    if len(xs) > 2 and xs[-1] - xs[-2] <= 1e-15:
        xs = np.delete(xs, -2)
        ys = np.delete(ys, -2)
    if len(xs) < 2:
        xs, ys = np.array([0.0, 1.0]), np.array([ys[0], ys[-1]])
    return xs, ys


def _merge_collinear(xs, ys):
    if len(xs) <= 2:
        return xs, ys
    slopes = np.diff(ys) / np.diff(xs)
    scale = np.maximum(1.0, np.maximum(np.abs(slopes[1:]), np.abs(slopes[:-1])))
    interior = np.abs(np.diff(slopes)) >= SLOPE_MERGE_TOL * scale
    keep = np.concatenate([[True], interior, [True]])
    return xs[keep].copy(), ys[keep].copy()


# -- module-level operations ------------------------------------------------


def evaluate(f: PLConcave, q):
    return f.evaluate(q)


def supergradient(f: PLConcave, q: float) -> float:
    return f.supergradient(q)


def shift(f: PLConcave, delta: float) -> PLConcave:
    return f.shift(delta)


def upper_expectation(d: DiscreteDistribution) -> PLConcave:
    """``q -> q * E[X | X in its top q quantile]`` for a finite law."""
    order = np.argsort(-d.values, kind="stable")
    return PLConcave.from_segments(0.0, d.values[order], d.probs[order])


def weighted_sup_convolution(parts: Sequence[tuple[float, PLConcave]], tol: float = TOL) -> PLConcave:
    """Best value of ``sum w_k f_k(q_k)`` subject to ``sum w_k q_k = q``.

    Every piece of every part is scaled in width by its weight; sorting all
    pieces by slope and concatenating them gives the exact optimum.
    """
    total = sum(w for w, _ in parts)
    if abs(total - 1.0) > tol:
        raise ValueError(f"weights sum to {total!r}, not 1")
    if len(parts) == 1:
        return parts[0][1]
    slopes = np.concatenate([f.slopes for _, f in parts])
    widths = np.concatenate([w * f.widths for w, f in parts])
    y0 = sum(w * f.ys[0] for w, f in parts)
    order = np.argsort(-slopes, kind="stable")
    return PLConcave.from_segments(y0, slopes[order], widths[order] / total)


def concave_envelope(fs: Sequence[PLConcave]) -> PLConcave:
    """Pointwise smallest concave function lying above every input."""
    if not fs:
        raise ValueError("need at least one function")
    if len(fs) == 1:
        return fs[0]
    xs = np.concatenate([f.xs for f in fs])
    ys = np.concatenate([f.ys for f in fs])
    hx, hy, _ = upper_hull(xs, ys)
    return PLConcave(hx, hy, check=False)


def upper_hull(xs, ys):
    """Upper concave hull of a point cloud spanning x in [0, 1].

    Returns hull abscissae, ordinates and, for every hull vertex, the index
    of the input point it came from.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    order = np.lexsort((-ys, xs))
    hull: list[int] = []
    last_x = None
    for k in order:
        x, y = xs[k], ys[k]
        if last_x is not None and x == last_x:
            continue
        last_x = x
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            cross = (xs[j] - xs[i]) * (y - ys[i]) - (ys[j] - ys[i]) * (x - xs[i])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(int(k))
    idx = np.array(hull)
    return xs[idx].copy(), ys[idx].copy(), idx


def theta_grid(b: float, alpha: float) -> np.ndarray:
    """``(0, b, b(1+alpha), b(1+alpha)^2, ..., 1)``."""
    if not 0 < alpha:
        raise ValueError("alpha must be positive")
    if b >= 1.0:
        return np.array([0.0, 1.0])
    n_steps = int(np.floor(np.log(1.0 / b) / np.log1p(alpha)))
    pts = b * np.power(1.0 + alpha, np.arange(n_steps + 1))
    pts = pts[pts < 1.0]
    return np.concatenate([[0.0], pts, [1.0]])


def iron(values, grid, cap_at_b: float, b: float) -> PLConcave:
    """Cap the value at ``b``, enforce monotonicity, then take the concave hull.

    ``grid`` must be the increasing grid ``(0, b, ..., 1)`` with ``b`` at
    position 1; ``values`` are candidate function values on it.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.array(values, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0.0 or grid[-1] != 1.0 or not (np.diff(grid) > 0).all():
        raise ValueError("grid must increase strictly from 0 to 1")
    if vals.shape != grid.shape:
        raise ValueError("one value per grid point required")
    if abs(grid[1] - b) > 1e-15 and not (b >= 1.0 and len(grid) == 2):
        raise ValueError("grid[1] must equal b")
    vals[1] = min(vals[1], cap_at_b)
    if len(vals) > 2:
        vals[1:] = np.maximum.accumulate(vals[1:])
    hx, hy, _ = upper_hull(grid, vals)
    return PLConcave(hx, hy, check=False)
