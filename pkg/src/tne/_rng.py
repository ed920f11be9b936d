"""Small deterministic seed-mixing helpers shared by the numba kernels."""

import numba as nb
import numpy as np

_MASK = (1 << 64) - 1


@nb.njit(cache=True)
def splitmix64(x):
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = x
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True)
def stream_seed(seed, a, b):
    """Derive a 32-bit seed for numba's per-thread generator from ``(seed, a, b)``."""
    h = splitmix64(np.uint64(seed))
    h = splitmix64(h ^ np.uint64(a))
    h = splitmix64(h ^ np.uint64(b))
    return np.int64(h >> np.uint64(33))


def numpy_rng(seed: int, *stream: int) -> np.random.Generator:
    """NumPy generator for the python-level code, keyed by ``seed`` and a stream id."""
    return np.random.default_rng(np.random.SeedSequence([seed & _MASK, *stream]))
