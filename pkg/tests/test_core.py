import threading

import numpy as np
import pytest

from kwaycache.core import (
    MASK64,
    RESERVED_KEY,
    CacheConfig,
    Policy,
    SetBlock,
    SplitMix64,
    Variant,
    canonical_key,
    fingerprint,
    hash64,
    mix64,
    next_pow2,
    set_index,
    set_index_raw,
    tick,
)


def oracle_mix(x: int) -> int:
    """Straight-line reimplementation of the avalanche hash, kept independent
    of the library's own code on purpose."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


class TestHashing:
    def test_mix64_matches_oracle(self):
        for x in (0, 1, 2, 0xDEADBEEF, MASK64, 123456789123456789):
            assert mix64(x) == oracle_mix(x)

    def test_mix64_frozen_values(self):
        assert mix64(1) == 0x5692161D100B05E5
        assert mix64(0xDEADBEEF) == 0x4E062702EC929EEA

    def test_set_index_oracle_sequence(self):
        seed = 0x9E3779B97F4A7C15
        got = [set_index_raw(k, seed, 8) for k in range(10)]
        want = [oracle_mix((k + seed) & MASK64) & 7 for k in range(10)]
        assert got == want == [7, 1, 6, 5, 2, 2, 0, 7, 6, 4]

    def test_set_index_single_set(self):
        cfg = CacheConfig(capacity=8, ways=8)
        for k in (0, 5, 999, 2**63):
            assert set_index(k, cfg) == 0

    def test_set_index_masked_range(self):
        cfg = CacheConfig(capacity=64, ways=8)
        assert cfg.num_sets == 8
        for k in range(200):
            assert 0 <= set_index(k, cfg) < 8

    def test_set_index_stable(self):
        cfg = CacheConfig(capacity=1024, ways=4, hash_seed=77)
        first = [set_index(k, cfg) for k in range(100)]
        assert [set_index(k, cfg) for k in range(100)] == first

    def test_balanced_hashing(self):
        # 2^20 uniform keys over 1024 sets: max occupancy close to the mean.
        cfg = CacheConfig(capacity=4096, ways=4)
        assert cfg.num_sets == 1024
        rng = np.random.default_rng(1)
        keys = rng.integers(0, MASK64, 2**20, dtype=np.uint64)
        counts = np.zeros(1024, dtype=np.int64)
        for k in keys.tolist():
            counts[set_index(k, cfg)] += 1
        assert counts.max() / counts.mean() < 1.5

    def test_fingerprint_deterministic(self):
        for k in (0, 42, 2**60):
            assert fingerprint(k, 9) == fingerprint(k, 9)

    def test_fingerprint_collisions_birthday(self):
        rng = np.random.default_rng(2)
        keys = np.unique(rng.integers(0, MASK64, 10**6, dtype=np.uint64))
        fps = np.array([hash64(int(k), 12345) for k in keys[:10**6].tolist()],
                       dtype=np.uint64)
        collisions = len(fps) - len(np.unique(fps))
        assert collisions <= 1

    def test_fingerprint_independent_of_set(self):
        cfg = CacheConfig(capacity=64, ways=8, hash_seed=5)
        assert cfg.fp_seed != cfg.set_seed
        # keys in the same set still get distinct fingerprints
        same_set = [k for k in range(1000) if set_index(k, cfg) == 0][:20]
        fps = {fingerprint(k, cfg.fp_seed) for k in same_set}
        assert len(fps) == len(same_set)

    def test_canonical_key_never_reserved(self):
        assert canonical_key("alpha") == canonical_key("alpha")
        assert canonical_key("alpha") != canonical_key("beta")
        assert canonical_key("alpha") != RESERVED_KEY


class TestConfig:
    def test_rounding_up_power_of_two_sets(self):
        for cap, ways in ((48, 6), (100, 6), (1, 1), (7, 3), (1000, 8)):
            cfg = CacheConfig(capacity=cap, ways=ways)
            assert cfg.capacity >= cap
            assert cfg.capacity == cfg.num_sets * ways
            assert cfg.num_sets & (cfg.num_sets - 1) == 0

    def test_figure_layout_48_items_6_ways(self):
        cfg = CacheConfig(capacity=48, ways=6)
        assert cfg.num_sets == 8 and cfg.capacity == 48

    def test_invalid(self):
        with pytest.raises(ValueError):
            CacheConfig(capacity=0, ways=4)
        with pytest.raises(ValueError):
            CacheConfig(capacity=16, ways=0)

    def test_enum_coercion(self):
        cfg = CacheConfig(capacity=16, ways=4, policy="lfu", variant="wfa")
        assert cfg.policy is Policy.LFU and cfg.variant is Variant.WFA

    def test_next_pow2(self):
        assert [next_pow2(n) for n in (1, 2, 3, 5, 8, 9)] == [1, 2, 4, 8, 8, 16]


class TestTick:
    def test_first_tick_is_one(self):
        block = SetBlock(4)
        assert tick(block) == 1

    def test_sequential_monotone(self):
        block = SetBlock(4)
        a, b = tick(block), tick(block)
        assert (a, b) == (1, 2)

    def test_concurrent_ticks_distinct(self):
        block = SetBlock(4)
        seen = [[] for _ in range(4)]

        def work(i):
            for _ in range(1000):
                seen[i].append(tick(block))

        threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        values = sorted(v for chunk in seen for v in chunk)
        assert block.clock == 4000
        assert values == list(range(1, 4001))


class TestSplitMix:
    def test_deterministic(self):
        a, b = SplitMix64(3), SplitMix64(3)
        assert [a.next() for _ in range(10)] == [b.next() for _ in range(10)]

    def test_next_below_range(self):
        rng = SplitMix64(9)
        assert all(0 <= rng.next_below(7) < 7 for _ in range(1000))
