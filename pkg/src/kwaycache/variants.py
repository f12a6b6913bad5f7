"""The cache realizations: a plain single-threaded reference (ST) and the
three concurrent variants (WFA, WFSC, LS) backed by the numba kernels.

All four share one operational contract:

* ``get`` scans only the key's set, updates the hit entry's policy metadata
  and counts a hit or miss; when admission is on, every get records the key
  in the frequency sketch first.
* ``put`` updates an existing entry in place, otherwise fills the first
  empty slot, otherwise evicts the policy victim, gated by TinyLFU admission
  when enabled.  Under contention a put may silently not take effect (failed
  atomic exchange / failed lock upgrade); that relaxation is deliberate.

Driven by a single thread the four variants produce identical hit/miss
sequences; the test suite pins this exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels as K
from ._atomics import aligned_i64
from .admission import DEPTH, FrequencySketch
from .core import (
    MASK64,
    RESERVED_KEY,
    CacheConfig,
    EntryRecord,
    SetBlock,
    SplitMix64,
    Variant,
    derive_seed,
    next_pow2,
    set_index,
    to_i64,
    to_u64,
)
from .policies import on_access, on_insert, select_victim


@dataclass(frozen=True)
class CacheStats:
    hits: int
    misses: int

    @property
    def requests(self) -> int:
        return self.hits + self.misses


def _canon_u64(x: int, what: str = "key") -> int:
    x &= MASK64
    if what == "key" and x == RESERVED_KEY:
        raise ValueError("key 2**64-1 is reserved")
    return x


class STCache:
    """Plain sequential scan-and-update reference; not thread safe.

    This is the simulator's engine of record: every step is visible Python
    over the policies-module rules, which makes it the anchor the compiled
    variants are equivalence-tested against.
    """

    def __init__(self, config: CacheConfig):
        self.config = config
        self.sets = [SetBlock(config.ways) for _ in range(config.num_sets)]
        self.sketch: Optional[FrequencySketch] = (
            FrequencySketch(config.capacity, config.sketch_seed) if config.admission else None
        )
        self.rng = SplitMix64(config.rng_seed)
        self.hits = 0
        self.misses = 0
        self.slot_reads = 0  # instrumentation for the O(K) bound

    @property
    def stats(self) -> CacheStats:
        return CacheStats(self.hits, self.misses)

    def reset_stats(self) -> None:
        self.hits = 0
        self.misses = 0

    def get(self, key: int) -> Optional[int]:
        key = _canon_u64(key)
        block = self.sets[set_index(key, self.config)]
        now = block.tick()
        if self.sketch is not None:
            self.sketch.record(key)
        policy = self.config.policy
        for entry in block.slots:
            self.slot_reads += 1
            if entry is not None and entry.key == key:
                entry.meta = on_access(entry, policy, now)
                self.hits += 1
                return entry.value
        self.misses += 1
        return None

    def put(self, key: int, value: int, forced: bool = False) -> None:
        key = _canon_u64(key)
        value = _canon_u64(value, "value")
        block = self.sets[set_index(key, self.config)]
        now = block.tick()
        policy = self.config.policy

        view = []
        hit_entry: Optional[EntryRecord] = None
        for entry in block.slots:
            self.slot_reads += 1
            view.append((entry is not None,
                         entry.meta if entry is not None else 0,
                         entry.birth if entry is not None else 0))
            if entry is not None and entry.key == key:
                hit_entry = entry
                break
        if hit_entry is not None:
            hit_entry.value = value
            hit_entry.meta = on_access(hit_entry, policy, now)
            return

        victim = select_victim(view, policy, now, self.rng)
        if victim is None:
            slot = next(i for i, e in enumerate(block.slots) if e is None)
        else:
            self.slot_reads += self.config.ways
            slot = victim
            if self.sketch is not None and not forced:
                if not self.sketch.admit(key, block.slots[slot].key):
                    return
        meta0, birth0 = on_insert(policy, now)
        block.slots[slot] = EntryRecord(key, value, meta0, birth0, slot)

    def resident_keys(self) -> list[int]:
        return [e.key for b in self.sets for e in b.slots if e is not None]

    def __len__(self) -> int:
        return sum(1 for b in self.sets for e in b.slots if e is not None)


class KWayCache:
    """Concurrent set-associative cache over shared numpy state.

    One instance may be used from many threads at once; pass each thread its
    own ``tid`` (0..63) so statistics stay contention free.  WFA and WFSC
    mutate slots with single 128-bit compare-exchanges and never block; LS
    serializes each set behind a reader-writer word.
    """

    def __init__(self, config: CacheConfig):
        if config.variant is Variant.ST:
            raise ValueError("use STCache for the single-threaded reference")
        self.config = config
        n = config.capacity
        sketch_width = max(16, next_pow2(n))
        self._cfg = np.array(
            [config.num_sets, config.ways,
             K.POLICY_CODE[config.policy], K.VARIANT_CODE[config.variant],
             1 if config.admission else 0,
             to_i64(config.set_seed), to_i64(config.fp_seed),
             sketch_width - 1, 10 * n, DEPTH],
            dtype=np.int64)
        self.cells = aligned_i64(2 * n)
        self.cells[0::2] = K.EMPTY
        self.meta = np.zeros(n, dtype=np.int64)
        self.birth = np.zeros(n, dtype=np.int64)
        self.clocks = np.zeros(config.num_sets, dtype=np.int64)
        self.fps = np.zeros(n if config.variant is Variant.WFSC else 1, dtype=np.int64)
        self.locks = np.zeros(config.num_sets if config.variant is Variant.LS else 1,
                              dtype=np.int64)
        if config.admission:
            self.sketch_words = np.zeros(DEPTH * sketch_width // 16, dtype=np.uint64)
        else:
            self.sketch_words = np.zeros(1, dtype=np.uint64)
        self.sketch_seeds = np.array(
            [derive_seed(config.sketch_seed, 0xA0 + r) for r in range(DEPTH)],
            dtype=np.uint64)
        self.sketch_state = np.zeros(1, dtype=np.int64)
        self.rng_state = np.array([config.rng_seed], dtype=np.uint64)
        self._stats = np.zeros(K.MAX_THREADS * K.STATS_STRIDE, dtype=np.int64)

    def _args(self):
        return (self._cfg, self.cells, self.meta, self.birth, self.clocks,
                self.fps, self.locks, self.sketch_words, self.sketch_seeds,
                self.sketch_state, self.rng_state, self._stats)

    def get(self, key: int, tid: int = 0) -> Optional[int]:
        found, value = K.k_get(*self._args(), to_i64(_canon_u64(key)), tid)
        return to_u64(int(value)) if found else None

    def put(self, key: int, value: int, tid: int = 0, forced: bool = False) -> None:
        K.k_put(*self._args(), to_i64(_canon_u64(key)),
                to_i64(_canon_u64(value, "value")), tid, forced)

    def replay(self, keys: np.ndarray, tid: int = 0) -> None:
        """get-then-put-on-miss over a whole uint64 key array."""
        K.k_replay(*self._args(), np.ascontiguousarray(keys).view(np.int64), tid)

    def resident_keys(self) -> list[int]:
        """Keys of all occupied slots; meaningful only at quiescence."""
        ks = self.cells[0::2]
        return [to_u64(int(k)) for k in ks[ks != K.EMPTY]]

    @property
    def stats(self) -> CacheStats:
        return CacheStats(int(self._stats[0::K.STATS_STRIDE].sum()),
                          int(self._stats[1::K.STATS_STRIDE].sum()))

    @property
    def integrity_violations(self) -> int:
        return int(self._stats[2::K.STATS_STRIDE].sum())

    def reset_stats(self) -> None:
        self._stats[:] = 0

    def __len__(self) -> int:
        return int((self.cells[0::2] != K.EMPTY).sum())


Cache = Union[STCache, KWayCache]


def make_cache(config: CacheConfig) -> Cache:
    """Instantiate the realization selected by config.variant."""
    if config.variant is Variant.ST:
        return STCache(config)
    return KWayCache(config)
