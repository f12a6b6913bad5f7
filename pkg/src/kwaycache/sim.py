"""Single-threaded hit-ratio simulation, associativity sweeps, and the
Monte-Carlo capacity-theorem validator.

Replay discipline: for every key, get; on NOT_FOUND, put(key, f(key)) where
f is the canonical key mix.  Runs are deterministic for a fixed config and
seed; the kernel backend and the pure-Python reference produce identical hit
sequences (equivalence-tested), the kernels are just orders of magnitude
faster on long streams.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels as K
from .baselines import FullyAssociativeCache, SampledCache
from .core import CacheConfig, Variant, derive_seed, to_i64, value_for_key
from .traces import KeyStream, RequestScript
from .variants import KWayCache, STCache


@dataclass
class RunMetrics:
    """Outcome of one replay or timed run."""

    hits: int
    misses: int
    requests: int
    wall_time: float = 0.0

    def __post_init__(self) -> None:
        if self.hits + self.misses != self.requests:
            raise ValueError("hits + misses must equal requests")

    @property
    def hit_ratio(self) -> float:
        return self.hits / self.requests if self.requests else 0.0

    @property
    def ops_per_sec(self) -> float:
        return self.requests / self.wall_time if self.wall_time > 0 else 0.0


def _engine_variant(config: CacheConfig) -> CacheConfig:
    if config.variant is Variant.ST:
        return CacheConfig(config.capacity, config.ways, config.policy,
                           Variant.WFA, config.admission, config.hash_seed)
    return config


def run_hit_ratio(config: CacheConfig, stream: KeyStream,
                  backend: str = "kernel") -> RunMetrics:
    """Replay a stream through a fresh single-threaded cache."""
    if len(stream) == 0:
        raise ValueError("empty key stream")
    t0 = time.perf_counter()
    if backend == "kernel":
        cache = KWayCache(_engine_variant(config))
        cache.replay(stream.keys)
        stats = cache.stats
    elif backend == "python":
        cache = STCache(config)
        for key in stream:
            if cache.get(key) is None:
                cache.put(key, value_for_key(key))
        stats = cache.stats
    else:
        raise ValueError(f"unknown backend {backend!r}")
    wall = time.perf_counter() - t0
    return RunMetrics(stats.hits, stats.misses, len(stream), wall)


def replay_flat(cache, stream: KeyStream) -> RunMetrics:
    """Replay through a fully-associative or sampled baseline cache."""
    if len(stream) == 0:
        raise ValueError("empty key stream")
    t0 = time.perf_counter()
    for key in stream:
        if cache.get(key) is None:
            cache.put(key, value_for_key(key))
    wall = time.perf_counter() - t0
    return RunMetrics(cache.hits, cache.misses, len(stream), wall)


def replay_script(config: CacheConfig, script: RequestScript,
                  backend: str = "kernel") -> RunMetrics:
    """Pre-populate a cache with a script's resident set, then replay its
    stream; the metrics cover only the stream."""
    if backend == "kernel":
        cache = KWayCache(_engine_variant(config))
    else:
        cache = STCache(config)
    for key in script.resident:
        cache.put(int(key), value_for_key(int(key)), forced=True)
    cache.reset_stats()
    t0 = time.perf_counter()
    if backend == "kernel":
        cache.replay(script.stream.keys)
    else:
        for key in script.stream:
            if cache.get(key) is None:
                cache.put(key, value_for_key(key))
    wall = time.perf_counter() - t0
    stats = cache.stats
    return RunMetrics(stats.hits, stats.misses, len(script.stream), wall)


@dataclass
class SweepRow:
    """One line of an associativity sweep."""

    label: str
    kind: str           # "kway" | "sampled" | "fa"
    param: int          # ways or sample size; 0 for fa
    capacity: int
    metrics: RunMetrics


DEFAULT_WAYS = (4, 8, 16, 32, 64, 128)


def sweep_associativity(base_config: CacheConfig, stream: KeyStream,
                        ways_list: Sequence[int] = DEFAULT_WAYS,
                        sample_sizes: Sequence[int] = (8,),
                        include_fa: bool = True,
                        backend: str = "kernel") -> list[SweepRow]:
    """Replay one stream at fixed capacity across set sizes, sample sizes
    and the fully associative reference.

    Ways that do not divide the capacity get their row's capacity re-rounded
    upward (and reported in the row).
    """
    capacity = base_config.capacity
    rows: list[SweepRow] = []
    for ways in ways_list:
        cfg = CacheConfig(capacity, ways, base_config.policy, base_config.variant,
                          base_config.admission, base_config.hash_seed)
        metrics = run_hit_ratio(cfg, stream, backend=backend)
        rows.append(SweepRow(f"kway{ways}", "kway", ways, cfg.capacity, metrics))
    for s in sample_sizes:
        cache = SampledCache(capacity, base_config.policy, s,
                             base_config.admission, base_config.hash_seed)
        rows.append(SweepRow(f"sampled{s}", "sampled", s, capacity,
                             replay_flat(cache, stream)))
    if include_fa:
        cache = FullyAssociativeCache(capacity, base_config.policy,
                                      base_config.admission, base_config.hash_seed)
        rows.append(SweepRow("fa", "fa", 0, capacity, replay_flat(cache, stream)))
    return rows


def balls_in_bins(slots: int, ways: int, items: int, trials: int,
                  seed: int = 0) -> float:
    """Fraction of trials in which ``items`` random keys all fit when hashed
    into ``slots/ways`` sets holding at most ``ways`` keys each."""
    if ways < 1 or slots < 1:
        raise ValueError("slots and ways must be positive")
    if slots % ways != 0:
        raise ValueError("slots must be an exact multiple of ways")
    if items > slots:
        raise ValueError("cannot store more items than slots")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    num_sets = slots // ways
    occupancy = np.zeros(num_sets, dtype=np.int64)
    set_seed = derive_seed(seed, 0xB1)
    successes = K.k_balls_in_bins(num_sets, ways, items, trials,
                                  to_i64(seed), to_i64(set_seed), occupancy)
    return int(successes) / trials


def theorem_failure_bound(c_prime: int, c: int, k: int) -> float:
    """Union-bound probability that some set overflows when storing c items
    in a c_prime-slot k-way cache with c_prime >= 2c: (c_prime/k) * e^(-k/6).

    The source theorem's statement carries a positive exponent, but its
    proof substitutes delta=1 into exp(-k*delta^2/((1+delta)*3)); this is the
    proof's failure bound.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if c_prime < 2 * c:
        raise ValueError("theorem needs c_prime >= 2c")
    return (c_prime / k) * math.exp(-k / 6.0)
