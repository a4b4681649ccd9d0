"""Seeded randomness.

Every stochastic routine in the package draws from a numpy ``Generator``
backed by the Philox4x64 counter-based bit generator, keyed from a 64-bit
integer seed through ``SeedSequence``.  Philox output is specified bit for
bit, so a seed reproduces the same stream on every platform.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed) & (2**64 - 1))))


def uniforms(seed: int, shape) -> np.ndarray:
    """Uniform doubles in [0, 1) drawn from the stream keyed by ``seed``."""
    return make_rng(seed).random(shape)
