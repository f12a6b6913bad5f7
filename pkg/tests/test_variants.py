import pytest

from conftest import replay, uniform_trace
from kwaycache.core import (
    CacheConfig,
    Policy,
    Variant,
    fingerprint,
    to_i64,
    value_for_key,
)
from kwaycache.variants import KWayCache, STCache, make_cache

ALL_VARIANTS = [Variant.ST, Variant.WFA, Variant.WFSC, Variant.LS]


def build(variant, capacity=64, ways=8, policy=Policy.LRU, admission=False, seed=0):
    cfg = CacheConfig(capacity, ways, policy, variant, admission, seed)
    return make_cache(cfg)


class TestGetPut:
    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_empty_cache_misses(self, variant):
        cache = build(variant)
        assert cache.get(123) is None

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_read_your_write(self, variant):
        cache = build(variant)
        cache.put(5, 500)
        assert cache.get(5) == 500

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_overwrite_value(self, variant):
        cache = build(variant)
        cache.put(5, 1)
        cache.put(5, 2)
        assert cache.get(5) == 2
        assert len(cache) == 1

    def test_st_lru_in_set_eviction_hand_trace(self):
        # one 2-way set: a,b resident; get(a) refreshes a; put(c) evicts b
        cache = build(Variant.ST, capacity=2, ways=2)
        a, b, c = 1, 2, 3
        cache.put(a, 10)
        cache.put(b, 20)
        assert cache.get(a) == 10
        cache.put(c, 30)
        assert sorted(cache.resident_keys()) == [a, c]

    def test_single_set_lru_evicts_first_inserted(self):
        cache = build(Variant.ST, capacity=8, ways=8)
        for k in range(9):
            cache.put(k, k)
        resident = sorted(cache.resident_keys())
        assert len(resident) == 8 and 0 not in resident

    def test_reserved_key_rejected(self):
        cache = build(Variant.WFA)
        with pytest.raises(ValueError):
            cache.put(2**64 - 1, 0)
        with pytest.raises(ValueError):
            cache.get(2**64 - 1)

    def test_st_variant_refuses_kway_wrapper(self):
        cfg = CacheConfig(16, 4, variant=Variant.ST)
        with pytest.raises(ValueError):
            KWayCache(cfg)


class TestWfscArrays:
    def test_fingerprint_and_counter_after_put(self):
        cfg = CacheConfig(capacity=8, ways=8, policy=Policy.LFU,
                          variant=Variant.WFSC)
        cache = KWayCache(cfg)
        # fill the set, then evict into a known victim slot
        for k in range(8):
            cache.put(k, k)
        cache.put(100, 100)  # LFU: all counts equal, earliest birth evicted
        slots = cache.cells[0::2].tolist()
        slot = slots.index(100)
        assert cache.fps[slot] == to_i64(fingerprint(100, cfg.fp_seed))
        assert cache.meta[slot] == 0  # parallel counter reset on replacement
        assert cache.birth[slot] > 0

    def test_poisoned_fingerprint_never_returns_wrong_value(self):
        # a fingerprint match is only a hint; the full key is re-verified
        cfg = CacheConfig(capacity=8, ways=8, variant=Variant.WFSC)
        cache = KWayCache(cfg)
        cache.put(1, 11)
        slot = cache.cells[0::2].tolist().index(1)
        other = 2**40 + 17
        cache.fps[slot] = to_i64(fingerprint(other, cfg.fp_seed))
        assert cache.get(other) is None        # stale fingerprint, key differs
        cache.fps[slot] = to_i64(fingerprint(1, cfg.fp_seed))
        assert cache.get(1) == 11


class TestAdmissionGate:
    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_fresh_sketch_rejects_unseen_key(self, variant):
        # puts never record, so a never-request key estimates 0 and ties lose
        cache = build(variant, capacity=8, ways=8, policy=Policy.LFU,
                      admission=True)
        for k in range(8):
            cache.put(k, k)
        before = sorted(cache.resident_keys())
        cache.put(999, 999)
        assert sorted(cache.resident_keys()) == before

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_frequent_key_admitted(self, variant):
        cache = build(variant, capacity=8, ways=8, policy=Policy.LFU,
                      admission=True)
        for k in range(8):
            cache.put(k, k)
        for _ in range(6):
            cache.get(999)  # misses, but records frequency
        cache.put(999, 999)
        assert 999 in cache.resident_keys()


class TestResidentKeys:
    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_empty(self, variant):
        assert build(variant).resident_keys() == []

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_partial_fill_exact_keys(self, variant):
        cache = build(variant, capacity=8, ways=8)
        for k in (3, 5, 7):
            cache.put(k, k)
        assert sorted(cache.resident_keys()) == [3, 5, 7]

    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_no_duplicates_after_churn(self, variant):
        cache = build(variant, capacity=32, ways=4)
        trace = uniform_trace(13, 5000, 120)
        for k in trace:
            if cache.get(k) is None:
                cache.put(k, value_for_key(k))
        keys = cache.resident_keys()
        assert len(keys) == len(set(keys))
        assert len(keys) <= 32


class TestStats:
    @pytest.mark.parametrize("variant", ALL_VARIANTS)
    def test_hits_plus_misses_equals_gets(self, variant):
        cache = build(variant, capacity=16, ways=4)
        trace = uniform_trace(3, 1000, 40)
        replay(cache, trace)
        assert cache.stats.requests == 1000


class TestStepBound:
    def test_st_slot_reads_within_2k_plus_constant(self):
        cfg = CacheConfig(capacity=64, ways=8, variant=Variant.ST)
        cache = STCache(cfg)
        trace = uniform_trace(1, 2000, 300)
        for k in trace:
            start = cache.slot_reads
            if cache.get(k) is None:
                after_get = cache.slot_reads
                assert after_get - start <= 8
                cache.put(k, value_for_key(k))
                assert cache.slot_reads - after_get <= 2 * 8 + 2
            else:
                assert cache.slot_reads - start <= 8
