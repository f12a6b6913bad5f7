"""Fully-associative and sampled-eviction reference caches.

These are the single-threaded comparison points: the fully associative cache
applies its policy over all residents (the hit-ratio oracle for one-set
K-way caches), and the sampled cache picks victims from a small uniform
sample of resident slots.  Both follow the same logical-time discipline as
the set-associative caches (one tick per get and per put) and the same
metadata rules, but are implemented over flat slot arrays with a keyed index,
deliberately sharing no scan code with the K-way paths.

Used under one global lock, the fully associative cache doubles as the
contended throughput strawman.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .admission import FrequencySketch
from .core import META_MAX, CacheConfig, Policy, SplitMix64

__all__ = ["FullyAssociativeCache", "SampledCache"]


class _FlatCache:
    """Slot-array cache skeleton: keyed index, per-slot meta/birth, one clock."""

    def __init__(self, capacity: int, policy: Policy, admission: bool, seed: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        cfg = CacheConfig(capacity=capacity, ways=capacity, policy=policy,
                          admission=admission, hash_seed=seed)
        self.capacity = capacity
        self.policy = Policy(policy)
        self.admission = admission
        self.sketch: Optional[FrequencySketch] = (
            FrequencySketch(capacity, cfg.sketch_seed) if admission else None
        )
        self.meta = np.zeros(capacity, dtype=np.int64)
        self.birth = np.zeros(capacity, dtype=np.int64)
        self.values: list[int] = [0] * capacity
        self.slot_key: list[Optional[int]] = [None] * capacity
        self.index: dict[int, int] = {}
        self.free = list(range(capacity - 1, -1, -1))  # pop() yields slot 0 first
        self.clock = 0
        self.rng = SplitMix64(cfg.rng_seed)
        self.hits = 0
        self.misses = 0

    # -- metadata rules (same contract as the K-way policies) ---------------

    def _bump_on_hit(self, slot: int) -> None:
        if self.policy is Policy.LRU:
            self.meta[slot] = self.clock
        elif self.policy in (Policy.LFU, Policy.HYPERBOLIC):
            self.meta[slot] = min(int(self.meta[slot]) + 1, META_MAX)

    def _install(self, slot: int, key: int, value: int) -> None:
        if self.policy in (Policy.LFU, Policy.HYPERBOLIC):
            self.meta[slot] = 1
        elif self.policy is Policy.RANDOM:
            self.meta[slot] = 0
        else:
            self.meta[slot] = self.clock
        self.birth[slot] = self.clock
        self.values[slot] = value
        self.slot_key[slot] = key
        self.index[key] = slot

    # -- victim selection ----------------------------------------------------

    def _argmin_among(self, slots: np.ndarray) -> int:
        """Victim among candidate slots: min priority, then min birth."""
        if self.policy is Policy.HYPERBOLIC:
            ages = np.maximum(self.clock - self.birth[slots], 1)
            prio = self.meta[slots] / ages
        else:
            prio = self.meta[slots]
        best = np.flatnonzero(prio == prio.min())
        if len(best) > 1:
            births = self.birth[slots[best]]
            best = best[births == births.min()]
        return int(slots[best[0]])

    # -- operations ------------------------------------------------------------

    def get(self, key: int) -> Optional[int]:
        self.clock += 1
        if self.sketch is not None:
            self.sketch.record(key)
        slot = self.index.get(key)
        if slot is None:
            self.misses += 1
            return None
        self._bump_on_hit(slot)
        self.hits += 1
        return self.values[slot]

    def put(self, key: int, value: int, forced: bool = False) -> None:
        self.clock += 1
        slot = self.index.get(key)
        if slot is not None:
            self.values[slot] = value
            self._bump_on_hit(slot)
            return
        if self.free:
            self._install(self.free.pop(), key, value)
            return
        victim = self._select_victim()
        victim_key = self.slot_key[victim]
        if self.sketch is not None and not forced:
            if not self.sketch.admit(key, victim_key):
                return
        del self.index[victim_key]
        self._install(victim, key, value)

    def _select_victim(self) -> int:
        raise NotImplementedError

    def resident_keys(self) -> list[int]:
        return list(self.index.keys())

    def reset_stats(self) -> None:
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self.index)


class FullyAssociativeCache(_FlatCache):
    """Exact global policy semantics: the victim is the policy minimum
    over every resident entry (earliest birth breaks ties)."""

    def _select_victim(self) -> int:
        if self.policy is Policy.RANDOM:
            return self.rng.next_below(self.capacity)
        return self._argmin_among(np.arange(self.capacity))


class SampledCache(_FlatCache):
    """Sampled eviction: the victim is chosen only among ``sample_size``
    distinct uniformly drawn resident slots."""

    def __init__(self, capacity: int, policy: Policy, sample_size: int,
                 admission: bool = False, seed: int = 0):
        if not 1 <= sample_size <= capacity:
            raise ValueError("sample size must be in [1, capacity]")
        super().__init__(capacity, policy, admission, seed)
        self.sample_size = sample_size
        self._sample_rng = np.random.default_rng(seed & 0xFFFFFFFF)

    def _select_victim(self) -> int:
        # Eviction only happens with every slot occupied, so a draw over the
        # slot index space never lands on an empty slot.
        if self.sample_size == self.capacity:
            sample = np.arange(self.capacity)
        else:
            sample = self._sample_rng.choice(self.capacity, size=self.sample_size,
                                             replace=False)
        if self.policy is Policy.RANDOM:
            return int(sample[0])
        return self._argmin_among(np.asarray(sample))
