import numpy as np
import pytest

from kwaycache.core import value_for_key
from kwaycache.traces import KeyStream


def uniform_trace(seed: int, n: int, universe: int) -> KeyStream:
    rng = np.random.default_rng(seed)
    return KeyStream(rng.integers(0, universe, n).astype(np.uint64),
                     f"uniform(u={universe},s={seed})")


def replay(cache, keys):
    """get-then-put-on-miss; returns the per-request hit sequence."""
    seq = []
    for k in keys:
        k = int(k)
        v = cache.get(k)
        if v is None:
            cache.put(k, value_for_key(k))
            seq.append(0)
        else:
            seq.append(1)
    return seq


@pytest.fixture
def small_trace():
    return uniform_trace(11, 4000, 300)
