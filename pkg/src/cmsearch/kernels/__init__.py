"""Hot loops with a compiled (numba) and a pure-numpy implementation.

The compiled versions are used unless ``CMSEARCH_NO_NUMBA=1`` is set or a
call passes ``backend="numpy"``.  Both consume the same uniform draws and
return identical results.
"""

from __future__ import annotations

import numpy as np

from .._config import numba_disabled
from ..rng import make_rng
from .arena import Arena, arena_simulate_numpy
from .pipage import max_rounds, pipage_batch_numpy

CHUNK = 16_384
BACKENDS = ("numba", "numpy")


def resolve_backend(backend: str | None = None) -> str:
    if backend is None:
        return "numpy" if numba_disabled() else "numba"
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    return backend


def _chunks(seed: int, total: int, width: int):
    rng = make_rng(seed)
    done = 0
    while done < total:
        rows = min(CHUNK, total - done)
        yield rng.random((rows, width))
        done += rows


def pipage_sample(ranks: np.ndarray, q: np.ndarray, n_samples: int, seed: int, backend: str | None = None) -> np.ndarray:
    backend = resolve_backend(backend)
    width = max_rounds(len(q))
    out = []
    for U in _chunks(seed, n_samples, width):
        if backend == "numba":
            from ._numba import pipage_batch
            out.append(pipage_batch(q, ranks, U))
        else:
            out.append(pipage_batch_numpy(q, ranks, U))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def simulate_arena(arena: Arena, trials: int, seed: int, backend: str | None = None):
    """Welfare and final claimed-set bitmask of ``trials`` runs."""
    backend = resolve_backend(backend)
    ws, ms = [], []
    for U in _chunks(seed, trials, arena.n_cols):
        if backend == "numba":
            from ._numba import arena_simulate
            w, m = arena_simulate(U, *arena.arrays())
        else:
            w, m = arena_simulate_numpy(U, *arena.arrays())
        ws.append(w)
        ms.append(m)
    return np.concatenate(ws), np.concatenate(ms)


def arena_uniform_row(arena: Arena, seed: int) -> np.ndarray:
    """The draws trial 0 of :func:`simulate_arena` with this seed would use."""
    return make_rng(seed).random((1, arena.n_cols))[0]


__all__ = ["Arena", "pipage_sample", "resolve_backend", "simulate_arena", "arena_uniform_row"]
