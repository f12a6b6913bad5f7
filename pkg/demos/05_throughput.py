"""Concurrent throughput: independent sets versus one global lock.

Each repeat warms the cache with filler keys, releases all worker threads
from a barrier, and runs get-then-put-on-miss loops for a fixed duration on
a 100%-miss stream (the worst case for any cache).  The set-associative
variants run on compiled kernels with real atomic instructions and no
global coordination; the strawman is the exact fully associative cache
behind a single lock, which collapses under the same load.

Thread counts are capped to this machine; on a large box raise them.
"""
import os

from kwaycache import BenchPlan, CacheConfig, Policy, SynthMode, SyntheticSpec, Variant
from kwaycache.bench import report, run_throughput

cpus = os.cpu_count() or 1
thread_counts = sorted({1, min(2, cpus), min(4, cpus), min(8, cpus)})
miss = SyntheticSpec(SynthMode.MISS100, requests=1, seed=9)

results = []
for variant in (Variant.WFA, Variant.WFSC, Variant.LS):
    cfg = CacheConfig(2**14, 8, Policy.LRU, variant)
    for threads in thread_counts:
        r = run_throughput(BenchPlan(cfg, miss, threads=threads, duration=0.5,
                                     repeats=3, seed=9))
        results.append(r)
        print(f"{variant.value:>5} {threads}t: {r.mean_ops_per_sec / 1e6:7.2f} Mops/s"
              f"  (violations: {r.integrity_violations})")

base_cfg = CacheConfig(2**14, 8, Policy.LRU, Variant.WFA)
for threads in thread_counts:
    r = run_throughput(BenchPlan(base_cfg, miss, threads=threads, duration=0.5,
                                 repeats=3, seed=9, baseline="fa-lock"))
    results.append(r)
    print(f"fa-lock {threads}t: {r.mean_ops_per_sec / 1e6:7.3f} Mops/s")

print()
print(report(results, "csv"))
