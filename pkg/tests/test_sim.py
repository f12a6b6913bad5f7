import math

import numpy as np
import pytest

from conftest import uniform_trace
from kwaycache.core import CacheConfig, Policy, Variant
from kwaycache.sim import (
    RunMetrics,
    balls_in_bins,
    replay_script,
    run_hit_ratio,
    sweep_associativity,
    theorem_failure_bound,
)
from kwaycache.traces import KeyStream, SynthMode, SyntheticSpec, gen_fixed_hit, gen_zipf


class TestRunMetrics:
    def test_consistency_enforced(self):
        with pytest.raises(ValueError):
            RunMetrics(hits=1, misses=1, requests=3)

    def test_ratio(self):
        m = RunMetrics(hits=3, misses=1, requests=4)
        assert m.hit_ratio == 0.75


class TestRunHitRatio:
    def test_triple_repeat(self):
        stream = KeyStream(np.array([9, 9, 9], dtype=np.uint64))
        for backend in ("kernel", "python"):
            m = run_hit_ratio(CacheConfig(4, 4), stream, backend=backend)
            assert (m.hits, m.misses) == (2, 1)

    def test_all_distinct_no_hits(self):
        stream = KeyStream(np.arange(100, dtype=np.uint64))
        m = run_hit_ratio(CacheConfig(16, 4), stream)
        assert m.hits == 0

    def test_empty_stream_error(self):
        with pytest.raises(ValueError):
            run_hit_ratio(CacheConfig(16, 4),
                          KeyStream(np.empty(0, dtype=np.uint64)))

    def test_deterministic_across_invocations(self):
        z = gen_zipf(SyntheticSpec(SynthMode.ZIPF, universe=2**10,
                                   requests=20000, exponent=1.0, seed=3))
        cfg = CacheConfig(256, 8, Policy.LRU)
        assert run_hit_ratio(cfg, z).hits == run_hit_ratio(cfg, z).hits


class TestSweep:
    def test_single_set_row_equals_fa(self):
        trace = uniform_trace(5, 20000, 512)
        for policy in (Policy.LRU, Policy.LFU, Policy.FIFO):
            rows = sweep_associativity(CacheConfig(64, 8, policy), trace,
                                       ways_list=(64,), sample_sizes=())
            kway, fa = rows[0], rows[-1]
            assert fa.kind == "fa"
            assert kway.metrics.hits == fa.metrics.hits

    def test_row_shape_and_rounding(self):
        trace = uniform_trace(6, 3000, 100)
        rows = sweep_associativity(CacheConfig(48, 6), trace,
                                   ways_list=(6, 5), sample_sizes=(4,))
        by_label = {r.label: r for r in rows}
        assert by_label["kway6"].capacity == 48
        assert by_label["kway5"].capacity == 80  # re-rounded: 16 sets * 5 ways
        assert set(by_label) == {"kway6", "kway5", "sampled4", "fa"}

    def test_deterministic(self):
        trace = uniform_trace(7, 5000, 200)
        cfg = CacheConfig(64, 8)
        a = sweep_associativity(cfg, trace, ways_list=(4, 8), sample_sizes=(8,))
        b = sweep_associativity(cfg, trace, ways_list=(4, 8), sample_sizes=(8,))
        assert [(r.label, r.metrics.hits) for r in a] == \
            [(r.label, r.metrics.hits) for r in b]


class TestReplayScript:
    def test_hit100_is_all_hits(self):
        cfg = CacheConfig(2**10, 8, Policy.LRU, Variant.ST, hash_seed=12345)
        script = gen_fixed_hit(SyntheticSpec(SynthMode.HIT100, requests=5000,
                                             seed=1), cfg.capacity)
        m = replay_script(cfg, script)
        assert m.hit_ratio == 1.0

    def test_backends_agree(self):
        cfg = CacheConfig(256, 8, Policy.LRU, Variant.ST, hash_seed=7)
        script = gen_fixed_hit(SyntheticSpec(SynthMode.HIT90, requests=4000,
                                             seed=2), cfg.capacity)
        a = replay_script(cfg, script, backend="kernel")
        b = replay_script(cfg, script, backend="python")
        assert (a.hits, a.misses) == (b.hits, b.misses)


class TestBallsInBins:
    def test_one_set_always_fits(self):
        assert balls_in_bins(64, 64, 40, trials=25) == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            balls_in_bins(100, 7, 10, 5)   # 7 does not divide 100
        with pytest.raises(ValueError):
            balls_in_bins(64, 8, 100, 5)   # more items than slots
        with pytest.raises(ValueError):
            balls_in_bins(64, 8, 10, 0)

    def test_tight_packing_mostly_fails(self):
        # 64 items into 16 sets of 4: some set almost surely overflows
        assert balls_in_bins(64, 4, 64, trials=50, seed=3) < 0.2

    def test_deterministic(self):
        a = balls_in_bins(1024, 8, 400, trials=200, seed=9)
        b = balls_in_bins(1024, 8, 400, trials=200, seed=9)
        assert a == b


class TestTheoremBound:
    def test_paper_instantiation_value(self):
        bound = theorem_failure_bound(200000, 100000, 64)
        assert math.isclose(bound, 3125 * math.exp(-64 / 6), rel_tol=1e-12)
        assert 0.07 < bound < 0.075

    def test_monotone_decreasing_in_k_at_fixed_sets(self):
        # fixed set count: failure bound shrinks exponentially with k
        prev = float("inf")
        for k in (8, 16, 32, 64, 128):
            b = theorem_failure_bound(3125 * k, 3125 * k // 2, k)
            assert b < prev
            prev = b

    def test_monotone_increasing_in_slots_at_fixed_k(self):
        assert theorem_failure_bound(300000, 100000, 64) > \
            theorem_failure_bound(200000, 100000, 64)

    def test_hypothesis_enforced(self):
        with pytest.raises(ValueError):
            theorem_failure_bound(100000, 60000, 64)

    def test_bound_dominates_empirical_failure(self):
        # small instantiation where both sides are cheap
        c_prime, k, c = 4096, 16, 2048
        bound = theorem_failure_bound(c_prime, c, k)
        trials = 400
        emp_fail = 1.0 - balls_in_bins(c_prime, k, c, trials=trials, seed=5)
        sigma = math.sqrt(max(emp_fail * (1 - emp_fail), 1e-9) / trials)
        assert emp_fail <= bound + 3 * sigma
