"""Multi-threaded throughput harness.

Measurement protocol, per repeat: build a fresh cache, warm it (main thread
fills every slot with non-workload filler, then each worker pushes
capacity/threads more non-workload keys through the put path), release all
workers from a shared barrier, run get-then-put-on-miss loops for the
configured duration, and count completed operations.  A point is the mean
over the repeats (11 by default).

Workers poll a shared stop flag every 64 operations instead of reading the
clock, and every hit is integrity-checked against the canonical key mix.
The ``fa-lock`` baseline drives the fully associative cache under one global
lock from plain Python threads, which is exactly the contention strawman the
set-associative variants are compared against.
"""
from __future__ import annotations

import json
import threading
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels as K
from .baselines import FullyAssociativeCache
from .core import CacheConfig, SplitMix64, Variant, derive_seed, value_for_key
from .traces import RESIDENT_BASE, WARM_BASE, KeyStream, SynthMode, SyntheticSpec
from .variants import KWayCache

_WAVE_BASE = WARM_BASE + (1 << 40)          # per-thread warm-wave key space
_FRESH_STRIDE = 1 << 32                      # per-thread fresh-key spacing

_MODE_CODE = {SynthMode.MISS100: K.M_MISS100, SynthMode.HIT100: K.M_HIT100,
              SynthMode.HIT95: K.M_HIT95, SynthMode.HIT90: K.M_HIT90}

Workload = Union[SyntheticSpec, KeyStream]


@dataclass
class BenchPlan:
    """One throughput measurement: a cache, a workload, a thread count."""

    config: CacheConfig
    workload: Workload
    threads: int = 1
    duration: float = 1.0
    repeats: int = 11
    seed: int = 0
    baseline: Optional[str] = None  # "fa-lock" replaces the k-way cache

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        cpus = os_cpu_count()
        if self.threads > cpus:
            warnings.warn(f"{self.threads} threads exceed {cpus} hardware threads",
                          RuntimeWarning, stacklevel=2)


def os_cpu_count() -> int:
    import os

    return os.cpu_count() or 1


@dataclass
class BenchResult:
    """Per-repeat throughput of one plan plus its mean."""

    variant: str
    policy: str
    ways: int
    capacity: int
    threads: int
    ops_per_sec: list[float] = field(default_factory=list)
    hit_ratios: list[float] = field(default_factory=list)
    integrity_violations: int = 0

    @property
    def mean_ops_per_sec(self) -> float:
        return sum(self.ops_per_sec) / len(self.ops_per_sec)

    @property
    def mean_hit_ratio(self) -> float:
        return sum(self.hit_ratios) / len(self.hit_ratios)


def _resident_keys(plan: BenchPlan) -> np.ndarray:
    """Resident working set for the fixed-hit synthetic modes."""
    spec = plan.workload
    size = spec.universe if spec.universe > 0 else max(1, plan.config.capacity // 4)
    size = min(size, plan.config.capacity)
    return RESIDENT_BASE + np.arange(size, dtype=np.uint64)


def warm_up(cache, plan: BenchPlan) -> None:
    """Fill the cache with non-workload keys before timing.

    The main-thread phase writes one filler entry per slot (random insertion
    cannot fill exactly); the per-thread phase pushes capacity/threads more
    filler keys through the regular put path, bypassing admission.
    """
    capacity = plan.config.capacity
    per_thread = max(1, capacity // plan.threads)
    if isinstance(cache, KWayCache):
        K.k_warm_fill(cache._cfg, cache.cells, cache.meta, cache.birth,
                      cache.fps, np.int64(WARM_BASE))
        waves = []
        for tid in range(plan.threads):
            start = np.int64(_WAVE_BASE + tid * _FRESH_STRIDE)
            waves.append(threading.Thread(
                target=K.k_warm_wave,
                args=(*cache._args(), start, per_thread, tid)))
        for t in waves:
            t.start()
        for t in waves:
            t.join()
    else:
        for i in range(capacity):
            key = WARM_BASE + i
            cache.put(key, value_for_key(key), forced=True)
        lock = threading.Lock()

        def wave(tid: int) -> None:
            base = _WAVE_BASE + tid * _FRESH_STRIDE
            for i in range(per_thread):
                with lock:
                    cache.put(base + i, value_for_key(base + i), forced=True)

        waves = [threading.Thread(target=wave, args=(tid,))
                 for tid in range(plan.threads)]
        for t in waves:
            t.start()
        for t in waves:
            t.join()
    cache.reset_stats()


def _workload_arrays(plan: BenchPlan):
    """(mode, stream_i64, resident_i64) for the worker kernels."""
    if isinstance(plan.workload, KeyStream):
        stream = np.ascontiguousarray(plan.workload.keys).view(np.int64)
        return K.M_TRACE, stream, np.zeros(1, dtype=np.int64)
    mode = _MODE_CODE[plan.workload.mode]
    resident = _resident_keys(plan).view(np.int64)
    return mode, np.zeros(1, dtype=np.int64), resident


def _slice_bounds(n: int, threads: int, tid: int) -> tuple[int, int]:
    lo = n * tid // threads
    hi = n * (tid + 1) // threads
    if hi <= lo:  # degenerate short stream: share the whole thing
        return 0, n
    return lo, hi


_compiled_once = False


def _precompile(plan: BenchPlan) -> None:
    """Force kernel compilation off the timed path."""
    global _compiled_once
    if _compiled_once or plan.baseline is not None:
        return
    cfg = CacheConfig(capacity=64, ways=8, policy=plan.config.policy,
                      variant=plan.config.variant, admission=plan.config.admission,
                      hash_seed=plan.config.hash_seed)
    cache = KWayCache(cfg)
    K.k_warm_fill(cache._cfg, cache.cells, cache.meta, cache.birth, cache.fps,
                  np.int64(WARM_BASE))
    K.k_warm_wave(*cache._args(), np.int64(_WAVE_BASE), 4, 0)
    stop = np.ones(1, dtype=np.int64)
    K.k_bench_worker(*cache._args(), K.M_MISS100, np.zeros(1, dtype=np.int64),
                     0, 1, np.zeros(1, dtype=np.int64), np.int64(1 << 41),
                     np.int64(1), stop, 0)
    _compiled_once = True


def _run_repeat_engine(plan: BenchPlan) -> tuple[float, float, int]:
    cache = KWayCache(plan.config)
    warm_up(cache, plan)
    mode, stream, resident = _workload_arrays(plan)
    if mode in (K.M_HIT100, K.M_HIT95, K.M_HIT90):
        K.k_warm_wave(*cache._args(), np.int64(RESIDENT_BASE), len(resident), 0)
        cache.reset_stats()

    stop = np.zeros(1, dtype=np.int64)
    barrier = threading.Barrier(plan.threads + 1)
    threads = []
    for tid in range(plan.threads):
        lo, hi = _slice_bounds(len(stream), plan.threads, tid)
        fresh = np.int64((1 << 41) + tid * _FRESH_STRIDE)
        rng_seed = np.int64(derive_seed(plan.seed, 0xC0 + tid) & 0x7FFFFFFFFFFFFFFF)

        def work(tid=tid, lo=lo, hi=hi, fresh=fresh, rng_seed=rng_seed):
            barrier.wait()
            K.k_bench_worker(*cache._args(), mode, stream, lo, hi, resident,
                             fresh, rng_seed, stop, tid)

        threads.append(threading.Thread(target=work))
    for t in threads:
        t.start()
    barrier.wait()
    t0 = time.perf_counter()
    time.sleep(plan.duration)
    stop[0] = 1
    for t in threads:
        t.join()
    elapsed = time.perf_counter() - t0
    ops = int(cache._stats[3::K.STATS_STRIDE].sum())
    stats = cache.stats
    hit_ratio = stats.hits / stats.requests if stats.requests else 0.0
    return ops / elapsed, hit_ratio, cache.integrity_violations


def _run_repeat_fa_lock(plan: BenchPlan) -> tuple[float, float, int]:
    cache = FullyAssociativeCache(plan.config.capacity, plan.config.policy,
                                  plan.config.admission, plan.config.hash_seed)
    warm_up(cache, plan)
    if isinstance(plan.workload, SyntheticSpec) and \
            plan.workload.mode in (SynthMode.HIT100, SynthMode.HIT95, SynthMode.HIT90):
        for key in _resident_keys(plan):
            cache.put(int(key), value_for_key(int(key)), forced=True)
        cache.hits = cache.misses = 0

    lock = threading.Lock()
    stop = [False]
    counts = [0] * plan.threads
    violations = [0] * plan.threads
    barrier = threading.Barrier(plan.threads + 1)
    stream = plan.workload.keys if isinstance(plan.workload, KeyStream) else None
    mode = None if stream is not None else plan.workload.mode
    resident = None if stream is not None else _resident_keys(plan)

    def work(tid: int) -> None:
        barrier.wait()
        ops = 0
        rng = SplitMix64(derive_seed(plan.seed, 0xC0 + tid))
        fresh = (1 << 41) + tid * _FRESH_STRIDE
        if stream is not None:
            lo, hi = _slice_bounds(len(stream), plan.threads, tid)
            pos = lo
        step = 0
        while True:
            for _ in range(64):
                if stream is not None:
                    key = int(stream[pos])
                    pos += 1
                    if pos >= hi:
                        pos = lo
                    fresh_turn = True  # trace replay always put-on-miss
                elif mode is SynthMode.MISS100:
                    key, fresh, fresh_turn = fresh, fresh + 1, True
                elif mode is SynthMode.HIT100:
                    key, fresh_turn = int(resident[rng.next_below(len(resident))]), False
                else:
                    period = 20 if mode is SynthMode.HIT95 else 10
                    if step == period - 1:
                        key, fresh, fresh_turn = fresh, fresh + 1, True
                        step = 0
                    else:
                        key = int(resident[rng.next_below(len(resident))])
                        fresh_turn = False
                        step += 1
                with lock:
                    v = cache.get(key)
                ops += 1
                if v is not None:
                    if v != value_for_key(key):
                        violations[tid] += 1
                elif fresh_turn:
                    with lock:
                        cache.put(key, value_for_key(key))
                    ops += 1
            counts[tid] = ops
            if stop[0]:
                return

    threads = [threading.Thread(target=work, args=(tid,))
               for tid in range(plan.threads)]
    for t in threads:
        t.start()
    barrier.wait()
    t0 = time.perf_counter()
    time.sleep(plan.duration)
    stop[0] = True
    for t in threads:
        t.join()
    elapsed = time.perf_counter() - t0
    requests = cache.hits + cache.misses
    hit_ratio = cache.hits / requests if requests else 0.0
    return sum(counts) / elapsed, hit_ratio, sum(violations)


def run_throughput(plan: BenchPlan) -> BenchResult:
    """Run every repeat of a plan and return per-repeat ops/sec plus means."""
    if plan.baseline not in (None, "fa-lock"):
        raise ValueError(f"unknown baseline {plan.baseline!r}")
    _precompile(plan)
    if plan.baseline == "fa-lock":
        variant, ways = "fa-lock", 0
    else:
        if plan.config.variant is Variant.ST:
            raise ValueError("throughput needs a concurrent variant or a baseline")
        variant, ways = plan.config.variant.value, plan.config.ways
    result = BenchResult(variant, plan.config.policy.value, ways,
                         plan.config.capacity, plan.threads)
    for _ in range(plan.repeats):
        if plan.baseline == "fa-lock":
            ops, hr, viol = _run_repeat_fa_lock(plan)
        else:
            ops, hr, viol = _run_repeat_engine(plan)
        result.ops_per_sec.append(ops)
        result.hit_ratios.append(hr)
        result.integrity_violations += viol
    return result


CSV_HEADER = "variant,policy,ways,capacity,threads,repeat,ops_per_sec,hit_ratio"


def report_csv(results: Sequence[BenchResult]) -> str:
    """One CSV row per repeat plus a mean row per plan."""
    lines = [CSV_HEADER]
    for r in results:
        for i, (ops, hr) in enumerate(zip(r.ops_per_sec, r.hit_ratios)):
            lines.append(f"{r.variant},{r.policy},{r.ways},{r.capacity},"
                         f"{r.threads},{i},{ops:.3f},{hr:.6f}")
        lines.append(f"{r.variant},{r.policy},{r.ways},{r.capacity},"
                     f"{r.threads},mean,{r.mean_ops_per_sec:.3f},{r.mean_hit_ratio:.6f}")
    return "\n".join(lines) + "\n"


def report_json(results: Sequence[BenchResult]) -> str:
    """One object per plan with the full repeat vectors (same numbers as CSV)."""
    payload = [
        {
            "variant": r.variant,
            "policy": r.policy,
            "ways": r.ways,
            "capacity": r.capacity,
            "threads": r.threads,
            "repeats": [round(x, 3) for x in r.ops_per_sec],
            "mean_ops_per_sec": round(r.mean_ops_per_sec, 3),
            "hit_ratios": [round(x, 6) for x in r.hit_ratios],
            "mean_hit_ratio": round(r.mean_hit_ratio, 6),
        }
        for r in results
    ]
    return json.dumps(payload, indent=2) + "\n"


def report(results: Sequence[BenchResult], fmt: str = "csv") -> str:
    if fmt == "csv":
        return report_csv(results)
    if fmt == "json":
        return report_json(results)
    raise ValueError(f"unknown report format {fmt!r}")
