"""TinyLFU admission: keep one-hit wonders out of the cache.

The frequency sketch counts every request in 4-bit saturating counters
(halved periodically so old popularity ages out).  On a miss with a full
set, the new key only replaces the victim if the sketch says it is strictly
more frequent.  On a skewed stream polluted with single-use keys, admission
protects the hot working set.
"""
import numpy as np

from kwaycache import CacheConfig, FrequencySketch, KeyStream, Policy
from kwaycache.sim import run_hit_ratio

# sketch mechanics
sketch = FrequencySketch(capacity=64, seed=7)
for _ in range(5):
    sketch.record(42)
sketch.record(43)
print("estimate(42) =", sketch.estimate(42), " estimate(43) =", sketch.estimate(43))
print("admit 42 over 43?", sketch.admit(42, 43))
print("admit 43 over 42?", sketch.admit(43, 42))
sketch.reset()
print("after aging, estimate(42) =", sketch.estimate(42))

# a hot zipf core interleaved with a one-shot scan
rng = np.random.default_rng(3)
hot_ranks = rng.zipf(1.2, 400_000) % 4096
scan = 10**6 + np.arange(len(hot_ranks))
mixed = np.empty(2 * len(hot_ranks), dtype=np.uint64)
mixed[0::2] = hot_ranks
mixed[1::2] = scan  # every other request is a never-repeated key
stream = KeyStream(mixed, "zipf+scan")

for policy in (Policy.LRU, Policy.LFU):
    for admission in (False, True):
        cfg = CacheConfig(capacity=2**10, ways=8, policy=policy,
                          admission=admission)
        m = run_hit_ratio(cfg, stream)
        label = f"{policy.value.upper():>4}{' + TinyLFU' if admission else '          '}"
        print(f"{label}: hit ratio {m.hit_ratio:.4f}")
