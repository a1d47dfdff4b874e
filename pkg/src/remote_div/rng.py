"""Counter-based random number streams.

Every randomized routine in the package derives its randomness from a
(seed, stream) pair fed into a Philox counter-based generator, so repeated
trials are mutually independent and each one is reproducible in isolation.
Stream ids below 2**32 are reserved for trial indices; helpers that need a
one-off stream (for example a random start point) use ids above that.
"""
from __future__ import annotations

import numpy as np

START_POINT_STREAM = 2**32
SPLIT_STREAM = 2**32 + 1


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return the generator for `stream` under `seed`.

    The same (seed, stream) pair always yields the same draws, regardless of
    what any other stream has consumed.
    """
    if seed < 0:
        raise ValueError("seed must be a nonnegative 64-bit integer")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
