"""Data model shared by every cache flavor: configuration, hashing, set addressing.

A cache of ``capacity`` slots is split into ``num_sets`` independent sets of
``ways`` slots each.  A key's set is fixed by a seeded 64-bit hash masked down
to the set count, which therefore must be a power of two; the constructor
rounds the requested capacity up until it is.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional

MASK64 = 0xFFFFFFFFFFFFFFFF

# splitmix64 constants (increment and the two finalizer multipliers).
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

#: All-ones key is reserved as the empty-slot marker in the slot arrays.
RESERVED_KEY = MASK64

#: Seed for canonicalizing non-numeric trace tokens; independent of any cache.
STRING_KEY_SEED = 0x8FE3_15E9_7C6B_0A51

#: Seed of the fixed key->value mix used by replay and the stress harness.
VALUE_SEED = 0x27D4_EB2F_1656_67C5

DEFAULT_HASH_SEED = GOLDEN

# Tags mixed into the configured seed to obtain independent hash streams.
_FP_TAG = 0xF1
_SKETCH_TAG = 0x5C
_RNG_TAG = 0x9D

META_MAX = 2**31 - 1  # LFU/Hyperbolic counters saturate here


def mix64(x: int) -> int:
    """splitmix64 finalizer: full-avalanche bijection on 64 bits."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX_A) & MASK64
    x = ((x ^ (x >> 27)) * _MIX_B) & MASK64
    return (x ^ (x >> 31)) & MASK64


def hash64(key: int, seed: int) -> int:
    """Seeded avalanche hash of a 64-bit key."""
    return mix64((key + seed) & MASK64)


def derive_seed(seed: int, tag: int) -> int:
    """Derive an independent seed stream from a base seed."""
    return mix64((seed ^ mix64(tag)) & MASK64)


def value_for_key(key: int) -> int:
    """The canonical value stored for a key by replay and stress runs."""
    return hash64(key, VALUE_SEED)


def canonical_key(token: str) -> int:
    """Canonicalize a non-numeric trace token to a 64-bit id."""
    h = STRING_KEY_SEED
    for b in token.encode("utf-8"):
        h = mix64(h ^ b)
    if h == RESERVED_KEY:  # vanishing chance; keep the sentinel unreachable
        h = mix64(h)
    return h


def next_pow2(n: int) -> int:
    """Smallest power of two >= n (n >= 1)."""
    return 1 << (n - 1).bit_length()


def to_i64(x: int) -> int:
    """Reinterpret a uint64 bit pattern as a signed 64-bit value."""
    x &= MASK64
    return x - (1 << 64) if x >= (1 << 63) else x


def to_u64(x: int) -> int:
    """Reinterpret a signed 64-bit value as its uint64 bit pattern."""
    return x & MASK64


class Policy(str, Enum):
    """In-set eviction policies."""

    LRU = "lru"
    LFU = "lfu"
    FIFO = "fifo"
    RANDOM = "random"
    HYPERBOLIC = "hyperbolic"


class Variant(str, Enum):
    """Concurrency-control realizations of the cache."""

    WFA = "wfa"    # wait-free reference-array style: one CAS per mutation
    WFSC = "wfsc"  # wait-free with separate fingerprint/counter arrays
    LS = "ls"      # one read-write lock per set
    ST = "st"      # plain single-threaded reference


@dataclass(frozen=True)
class CacheConfig:
    """Sizing, policy and seeding of one cache instance.

    ``capacity`` is rounded up so that ``capacity == num_sets * ways`` with
    ``num_sets`` a power of two.  ``hash_seed`` feeds set addressing directly;
    fingerprints, the admission sketch and the eviction RNG use independent
    streams derived from it.
    """

    capacity: int
    ways: int = 8
    policy: Policy = Policy.LRU
    variant: Variant = Variant.ST
    admission: bool = False
    hash_seed: int = DEFAULT_HASH_SEED

    def __post_init__(self) -> None:
        if self.ways < 1:
            raise ValueError(f"ways must be positive, got {self.ways}")
        if self.capacity < 1:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        object.__setattr__(self, "policy", Policy(self.policy))
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "hash_seed", self.hash_seed & MASK64)
        sets = next_pow2(max(1, -(-self.capacity // self.ways)))
        object.__setattr__(self, "capacity", sets * self.ways)

    @property
    def num_sets(self) -> int:
        return self.capacity // self.ways

    @property
    def set_seed(self) -> int:
        return self.hash_seed

    @property
    def fp_seed(self) -> int:
        return derive_seed(self.hash_seed, _FP_TAG)

    @property
    def sketch_seed(self) -> int:
        return derive_seed(self.hash_seed, _SKETCH_TAG)

    @property
    def rng_seed(self) -> int:
        return derive_seed(self.hash_seed, _RNG_TAG)


def set_index_raw(key: int, seed: int, num_sets: int) -> int:
    """Set number of a key under an explicit seed and power-of-two set count."""
    return hash64(key, seed) & (num_sets - 1)


def set_index(key: int, config: CacheConfig) -> int:
    """Set number of a key under a cache configuration."""
    return set_index_raw(key, config.set_seed, config.num_sets)


def fingerprint(key: int, seed: int) -> int:
    """Secondary 64-bit hash stored beside slots by the WFSC variant."""
    return hash64(key, seed)


@dataclass(slots=True)
class EntryRecord:
    """One cached item inside a set.

    ``meta`` is the policy counter: last-access time for LRU, access count for
    LFU and Hyperbolic, insertion time for FIFO, unused for Random.  ``birth``
    is the insertion time (Hyperbolic's t0).
    """

    key: int
    value: int
    meta: int
    birth: int
    slot_index: int


class SetBlock:
    """The K slots of one set plus its monotone logical clock.

    ``counters``/``fingerprints`` mirror the WFSC variant's parallel arrays;
    the plain reference cache leaves them unset.
    """

    __slots__ = ("slots", "clock", "counters", "fingerprints", "_lock")

    def __init__(self, ways: int, wfsc_arrays: bool = False):
        self.slots: list[Optional[EntryRecord]] = [None] * ways
        self.clock = 0
        self.counters: Optional[list[int]] = [0] * ways if wfsc_arrays else None
        self.fingerprints: Optional[list[int]] = [0] * ways if wfsc_arrays else None
        self._lock = threading.Lock()

    def tick(self) -> int:
        """Atomically advance and return the set's logical clock."""
        with self._lock:
            self.clock += 1
            return self.clock


def tick(block: SetBlock) -> int:
    """Advance a set's logical clock; safe for concurrent callers."""
    return block.tick()


class SplitMix64:
    """Tiny deterministic PRNG; the kernels step the identical sequence."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_below(self, n: int) -> int:
        return self.next() % n
