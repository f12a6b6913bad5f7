"""Exact-equivalence pins between the pure-Python reference cache, the
compiled variants, and the fully associative oracle.

These are the load-bearing tests: every hit/miss decision of the compiled
kernels must match the readable reference implementation step for step, and
a one-set K-way cache must reproduce the fully associative baseline exactly.
"""
import pytest

from conftest import replay, uniform_trace
from kwaycache.baselines import FullyAssociativeCache
from kwaycache.core import CacheConfig, Policy, Variant, value_for_key
from kwaycache.sim import run_hit_ratio
from kwaycache.variants import KWayCache, STCache

CONCURRENT = [Variant.WFA, Variant.WFSC, Variant.LS]
POLICIES = list(Policy)


@pytest.mark.parametrize("policy", POLICIES)
@pytest.mark.parametrize("admission", [False, True])
def test_single_thread_equivalence_all_variants(policy, admission):
    """ST, WFA, WFSC and LS produce identical hit/miss sequences when driven
    by one thread, for every policy, with and without admission."""
    trace = uniform_trace(17, 4000, 300)
    cfg = CacheConfig(64, 8, policy, Variant.ST, admission, hash_seed=5)
    want = replay(STCache(cfg), trace)
    for variant in CONCURRENT:
        cache = KWayCache(CacheConfig(64, 8, policy, variant, admission, 5))
        got = replay(cache, trace)
        assert got == want, f"{variant.value} diverged from the reference"


@pytest.mark.parametrize("policy", POLICIES)
def test_bulk_replay_kernel_equals_python(policy):
    trace = uniform_trace(23, 8000, 500)
    cfg = CacheConfig(128, 8, policy, Variant.ST, hash_seed=9)
    st = STCache(cfg)
    hits_py = sum(replay(st, trace))
    metrics = run_hit_ratio(cfg, trace, backend="kernel")
    assert metrics.hits == hits_py
    assert run_hit_ratio(cfg, trace, backend="python").hits == hits_py


@pytest.mark.parametrize("policy", [Policy.LRU, Policy.LFU, Policy.FIFO,
                                    Policy.HYPERBOLIC])
@pytest.mark.parametrize("capacity", [16, 64])
def test_one_set_kway_equals_fully_associative(policy, capacity):
    """The cross-module oracle: numSets=1, K=capacity reproduces the global
    policy exactly."""
    trace = uniform_trace(31, 6000, 4 * capacity)
    cfg = CacheConfig(capacity, capacity, policy, Variant.ST, hash_seed=3)
    assert cfg.num_sets == 1
    st_seq = replay(STCache(cfg), trace)
    fa_seq = replay(FullyAssociativeCache(capacity, policy, False, 3), trace)
    assert st_seq == fa_seq


def test_one_set_equivalence_with_admission():
    trace = uniform_trace(37, 6000, 256)
    cfg = CacheConfig(64, 64, Policy.LFU, Variant.ST, admission=True, hash_seed=3)
    st_seq = replay(STCache(cfg), trace)
    fa_seq = replay(FullyAssociativeCache(64, Policy.LFU, True, 3), trace)
    assert st_seq == fa_seq


def test_random_policy_rng_parity():
    """The kernels step the same splitmix stream as the reference, so even
    Random evictions match single-threaded."""
    trace = uniform_trace(41, 5000, 400)
    cfg = CacheConfig(64, 8, Policy.RANDOM, Variant.ST, hash_seed=21)
    want = replay(STCache(cfg), trace)
    for variant in CONCURRENT:
        got = replay(KWayCache(CacheConfig(64, 8, Policy.RANDOM, variant,
                                           hash_seed=21)), trace)
        assert got == want


def test_values_survive_replay():
    trace = uniform_trace(43, 3000, 100)
    cache = KWayCache(CacheConfig(64, 8, Policy.LRU, Variant.WFA))
    for k in trace:
        k = int(k)
        v = cache.get(k)
        if v is None:
            cache.put(k, value_for_key(k))
        else:
            assert v == value_for_key(k)


def test_resident_sets_match_reference_exactly():
    trace = uniform_trace(47, 4000, 200)
    cfg = CacheConfig(64, 8, Policy.LRU, Variant.ST, hash_seed=13)
    st = STCache(cfg)
    replay(st, trace)
    for variant in CONCURRENT:
        cache = KWayCache(CacheConfig(64, 8, Policy.LRU, variant, hash_seed=13))
        replay(cache, trace)
        assert sorted(cache.resident_keys()) == sorted(st.resident_keys())
