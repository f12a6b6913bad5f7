"""Build a cache, read and write it, and look inside.

A K-way set-associative cache splits its slots into independent sets of K
"ways"; each key hashes to one set and can only live there.  Eviction is an
O(K) scan of that one set, which is what makes these caches cheap and easy
to run concurrently.
"""
from kwaycache import CacheConfig, Policy, Variant, make_cache, set_index

# 48 slots organized as 8 sets x 6 ways (capacity rounds up so that the set
# count is a power of two).
cfg = CacheConfig(capacity=48, ways=6, policy=Policy.LRU, variant=Variant.ST)
print(f"capacity={cfg.capacity} ways={cfg.ways} num_sets={cfg.num_sets}")

cache = make_cache(cfg)
for key in range(10):
    cache.put(key, key * 1000)

print("get(3) ->", cache.get(3))
print("get(99) ->", cache.get(99), "(miss)")
print("stats:", cache.stats)

# every key is pinned to one set
for key in (3, 17, 99):
    print(f"key {key} lives in set {set_index(key, cfg)}")

# the concurrent variants share the same API; WFA/WFSC never block, LS uses
# one reader-writer lock per set
for variant in (Variant.WFA, Variant.WFSC, Variant.LS):
    c = make_cache(CacheConfig(64, 8, Policy.LFU, variant))
    c.put(7, 700)
    print(f"{variant.value}: get(7) -> {c.get(7)}")

# overfilling one set evicts its policy victim (here: least recently used)
small = make_cache(CacheConfig(capacity=2, ways=2, policy=Policy.LRU,
                               variant=Variant.ST))
small.put(1, 1)
small.put(2, 2)
small.get(1)          # refresh key 1
small.put(3, 3)       # evicts key 2
print("after eviction, resident:", sorted(small.resident_keys()))
