"""Trace ingestion and synthetic workload generation.

Three on-disk formats are understood, all normalized to a flat stream of
64-bit keys:

* plain      -- one key per line (first whitespace token; ``#`` comments and
                blank lines skipped; non-numeric tokens hashed to 64 bits)
* arc        -- ``startBlock blockCount ignored ignored`` per line, expanded
                to blockCount consecutive block keys
* spc        -- CSV ``asu,lba,size,opcode,timestamp[,...]``; the key is
                ``(asu << 48) XOR lba``, one key per record

Synthetic streams cover a seeded Zipf generator and the fixed-hit-ratio
request scripts (100% miss, 100%/95%/90% hit) used for calibration.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterator, Union

import numpy as np

from .core import MASK64, RESERVED_KEY, canonical_key

Source = Union[str, Path, IO[bytes]]

#: Disjoint key spaces for synthetic scripts: resident working set, fresh
#: never-seen keys, and the benchmark's warm-up filler.
RESIDENT_BASE = 1 << 40
FRESH_BASE = 1 << 41
WARM_BASE = 1 << 42


@dataclass
class KeyStream:
    """An ordered, immutable-by-convention sequence of canonical 64-bit keys."""

    keys: np.ndarray  # uint64
    source_label: str = ""

    def __post_init__(self) -> None:
        self.keys = np.ascontiguousarray(self.keys, dtype=np.uint64)

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self) -> Iterator[int]:
        return (int(k) for k in self.keys)


class SynthMode(str, Enum):
    MISS100 = "miss100"
    HIT100 = "hit100"
    HIT95 = "hit95"
    HIT90 = "hit90"
    ZIPF = "zipf"


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a synthetic workload."""

    mode: SynthMode
    universe: int = 0          # key universe (Zipf) or resident-set size (hit modes)
    requests: int = 1
    exponent: float = 1.0      # Zipf skew
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", SynthMode(self.mode))
        if self.requests < 1:
            raise ValueError("request count must be >= 1")
        if self.mode is SynthMode.ZIPF and self.exponent <= 0:
            raise ValueError("zipf exponent must be > 0")


@dataclass
class RequestScript:
    """A fixed-hit-ratio script: keys to pre-populate plus the request stream."""

    mode: SynthMode
    resident: np.ndarray  # uint64 keys to insert before replay
    stream: KeyStream


def _open(source: Source):
    if isinstance(source, (str, Path)):
        return open(source, "rb"), True
    return source, False


def _token_key(token: str) -> int:
    if token.isdigit():
        v = int(token) & MASK64
        return v if v != RESERVED_KEY else canonical_key(token)
    return canonical_key(token)


def parse_plain(source: Source) -> KeyStream:
    """Parse newline-delimited keys; blank lines and '#' comments skipped."""
    fh, owned = _open(source)
    label = getattr(fh, "name", "plain")
    keys: list[int] = []
    try:
        for raw in fh:
            line = raw.decode("utf-8", "replace").strip()
            if not line or line.startswith("#"):
                continue
            keys.append(_token_key(line.split()[0]))
    finally:
        if owned:
            fh.close()
    if not keys:
        raise ValueError(f"{label}: no keys found")
    return KeyStream(np.array(keys, dtype=np.uint64), str(label))


def parse_arc_blocks(source: Source) -> KeyStream:
    """Parse 'startBlock blockCount x y' lines into consecutive block keys."""
    fh, owned = _open(source)
    label = getattr(fh, "name", "arc")
    chunks: list[np.ndarray] = []
    try:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.decode("utf-8", "replace").strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) < 4:
                raise ValueError(f"{label}:{lineno}: expected 4 fields, got {len(fields)}")
            try:
                start, count = int(fields[0]), int(fields[1])
            except ValueError as exc:
                raise ValueError(f"{label}:{lineno}: bad block numbers") from exc
            if count < 0:
                raise ValueError(f"{label}:{lineno}: negative block count")
            chunks.append(np.arange(start, start + count, dtype=np.uint64))
    finally:
        if owned:
            fh.close()
    if not chunks or sum(len(c) for c in chunks) == 0:
        raise ValueError(f"{label}: no keys found")
    return KeyStream(np.concatenate(chunks), str(label))


def parse_spc(source: Source) -> KeyStream:
    """Parse SPC storage-trace CSV records; one fixed-granularity key each."""
    fh, owned = _open(source)
    label = getattr(fh, "name", "spc")
    keys: list[int] = []
    try:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.decode("utf-8", "replace").strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) < 5:
                raise ValueError(f"{label}:{lineno}: expected >=5 CSV fields")
            try:
                asu, lba = int(fields[0]), int(fields[1])
            except ValueError as exc:
                raise ValueError(f"{label}:{lineno}: bad asu/lba") from exc
            keys.append(((asu << 48) ^ lba) & MASK64)
    finally:
        if owned:
            fh.close()
    if not keys:
        raise ValueError(f"{label}: no keys found")
    return KeyStream(np.array(keys, dtype=np.uint64), str(label))


PARSERS = {"plain": parse_plain, "arc": parse_arc_blocks, "spc": parse_spc}


def write_plain(stream: KeyStream, target: Union[str, Path, IO[bytes]],
                header: str = "") -> None:
    """Serialize a stream in plain format (round-trips through parse_plain)."""
    fh, owned = (open(target, "wb"), True) if isinstance(target, (str, Path)) else (target, False)
    try:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n".encode())
        fh.write(b"\n".join(str(int(k)).encode() for k in stream.keys))
        fh.write(b"\n")
    finally:
        if owned:
            fh.close()


def gen_zipf(spec: SyntheticSpec) -> KeyStream:
    """Zipf-distributed stream: P(rank r) proportional to r**(-exponent),
    ranks mapped onto a seeded shuffle of the key universe."""
    if spec.mode is not SynthMode.ZIPF:
        raise ValueError("gen_zipf needs a ZIPF spec")
    if spec.universe < 1:
        raise ValueError("zipf universe must be >= 1")
    rng = np.random.default_rng(spec.seed)
    ranks = np.arange(1, spec.universe + 1, dtype=np.float64)
    probs = ranks ** -spec.exponent
    probs /= probs.sum()
    ids = rng.permutation(spec.universe).astype(np.uint64)
    draws = rng.choice(spec.universe, size=spec.requests, p=probs)
    return KeyStream(ids[draws], f"zipf(a={spec.exponent},u={spec.universe},s={spec.seed})")


def gen_fixed_hit(spec: SyntheticSpec, cache_capacity: int) -> RequestScript:
    """Build the fixed-hit-ratio scripts.

    miss100: fresh never-repeating keys (every get misses, every miss puts).
    hit100:  gets cycling over a pre-populated resident set.
    hit95:   19 resident gets then one fresh get+put, repeating.
    hit90:   9 resident gets then one fresh get+put, repeating.

    The resident set defaults to a quarter of the cache so fresh insertions
    land on empty or stale slots instead of displacing the working set.
    """
    n = spec.requests
    if spec.mode is SynthMode.MISS100:
        keys = FRESH_BASE + np.arange(n, dtype=np.uint64)
        return RequestScript(spec.mode, np.empty(0, dtype=np.uint64),
                             KeyStream(keys, "miss100"))

    size = spec.universe if spec.universe > 0 else max(1, cache_capacity // 4)
    size = min(size, cache_capacity)
    resident = RESIDENT_BASE + np.arange(size, dtype=np.uint64)

    if spec.mode is SynthMode.HIT100:
        keys = resident[np.arange(n) % size]
        return RequestScript(spec.mode, resident, KeyStream(keys, "hit100"))

    if spec.mode is SynthMode.HIT95:
        period, fresh_at = 20, 19
    elif spec.mode is SynthMode.HIT90:
        period, fresh_at = 10, 9
    else:
        raise ValueError(f"not a fixed-hit mode: {spec.mode}")

    idx = np.arange(n)
    is_fresh = (idx % period) == fresh_at
    keys = np.empty(n, dtype=np.uint64)
    res_positions = np.flatnonzero(~is_fresh)
    keys[res_positions] = resident[np.arange(len(res_positions)) % size]
    keys[is_fresh] = FRESH_BASE + np.arange(int(is_fresh.sum()), dtype=np.uint64)
    return RequestScript(spec.mode, resident, KeyStream(keys, spec.mode.value))
