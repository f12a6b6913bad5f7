"""How much hit ratio does limited associativity cost?

Replays one seeded Zipf stream through K-way caches of increasing set size,
through sampled-eviction baselines, and through the exact fully associative
cache, all at the same capacity.  The punchline: already at 8 ways the gap
to full associativity is marginal.
"""
from kwaycache import CacheConfig, Policy, SynthMode, SyntheticSpec, gen_zipf
from kwaycache.sim import sweep_associativity

stream = gen_zipf(SyntheticSpec(SynthMode.ZIPF, universe=2**16,
                                requests=200_000, exponent=1.0, seed=42))
cfg = CacheConfig(capacity=2**12, ways=8, policy=Policy.LRU)

rows = sweep_associativity(cfg, stream,
                           ways_list=(4, 8, 16, 32, 64, 128),
                           sample_sizes=(4, 8, 16, 32, 64, 128))
fa = next(r for r in rows if r.kind == "fa").metrics.hit_ratio

print(f"zipf(1.0) stream, {len(stream):,} requests, capacity {cfg.capacity}")
print(f"{'row':>12}  {'hit ratio':>9}  {'gap to FA':>9}")
for r in rows:
    gap = r.metrics.hit_ratio - fa
    print(f"{r.label:>12}  {r.metrics.hit_ratio:9.4f}  {gap:+9.4f}")
