"""kwaycache: K-way set-associative software caches.

Limited associativity splits a cache into many independent small sets, which
makes eviction an O(K) in-set scan and concurrent operation almost free of
synchronization.  This package provides the cache variants (wait-free array,
wait-free with separate fingerprint/counter arrays, one lock per set, and a
plain single-threaded reference), five eviction policies, TinyLFU admission,
fully-associative and sampled baselines, trace parsing and synthesis, a
deterministic hit-ratio simulator, a Monte-Carlo capacity validator, and a
multi-threaded throughput harness.
"""
from .admission import FrequencySketch
from .baselines import FullyAssociativeCache, SampledCache
from .bench import BenchPlan, BenchResult, report, run_throughput, warm_up
from .core import (
    CacheConfig,
    EntryRecord,
    Policy,
    SetBlock,
    Variant,
    fingerprint,
    hash64,
    mix64,
    set_index,
    tick,
    value_for_key,
)
from .policies import on_access, on_insert, select_victim
from .sim import (
    RunMetrics,
    SweepRow,
    balls_in_bins,
    replay_script,
    run_hit_ratio,
    sweep_associativity,
    theorem_failure_bound,
)
from .traces import (
    KeyStream,
    RequestScript,
    SynthMode,
    SyntheticSpec,
    gen_fixed_hit,
    gen_zipf,
    parse_arc_blocks,
    parse_plain,
    parse_spc,
    write_plain,
)
from .variants import CacheStats, KWayCache, STCache, make_cache

__version__ = "0.1.0"

__all__ = [
    "BenchPlan",
    "BenchResult",
    "CacheConfig",
    "CacheStats",
    "EntryRecord",
    "FrequencySketch",
    "FullyAssociativeCache",
    "KWayCache",
    "KeyStream",
    "Policy",
    "RequestScript",
    "RunMetrics",
    "SampledCache",
    "SetBlock",
    "STCache",
    "SweepRow",
    "SynthMode",
    "SyntheticSpec",
    "Variant",
    "balls_in_bins",
    "fingerprint",
    "gen_fixed_hit",
    "gen_zipf",
    "hash64",
    "make_cache",
    "mix64",
    "on_access",
    "on_insert",
    "parse_arc_blocks",
    "parse_plain",
    "parse_spc",
    "replay_script",
    "report",
    "run_hit_ratio",
    "run_throughput",
    "select_victim",
    "set_index",
    "sweep_associativity",
    "theorem_failure_bound",
    "tick",
    "value_for_key",
    "warm_up",
    "write_plain",
]
