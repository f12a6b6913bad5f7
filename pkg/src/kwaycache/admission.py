"""TinyLFU admission: a frequency sketch of 4-bit counters with periodic halving.

The sketch is ``depth`` rows of ``width`` saturating counters, packed 16 per
64-bit word.  Every cache request is recorded; on a miss with a full set the
candidate is admitted only if its estimated frequency strictly exceeds the
victim's.  Once ``sample_period`` records have accumulated, every counter is
halved (aging) and the record count restarts.

The concurrent kernels operate on the same word array with the same seeds, so
a single-threaded record sequence produces bit-identical words here and there.
"""
from __future__ import annotations

import numpy as np

from .core import MASK64, derive_seed, hash64, next_pow2

DEPTH = 4
_HALF_MASK = 0x7777777777777777  # clears the bit shifted into each nibble


class FrequencySketch:
    """Count-min style sketch feeding the admission decision."""

    __slots__ = ("width", "depth", "words", "op_count", "sample_period", "seeds", "_mask")

    def __init__(self, capacity: int, seed: int, depth: int = DEPTH):
        # Width >= 16 keeps every row on whole 64-bit words.
        self.width = max(16, next_pow2(capacity))
        self.depth = depth
        self.words = np.zeros(self.depth * self.width // 16, dtype=np.uint64)
        self.op_count = 0
        self.sample_period = 10 * capacity
        self.seeds = tuple(derive_seed(seed, 0xA0 + r) for r in range(depth))
        self._mask = self.width - 1

    def _slot(self, key: int, row: int) -> tuple[int, int]:
        """(word index, bit shift) of a key's counter in one row."""
        idx = hash64(key, self.seeds[row]) & self._mask
        flat = row * self.width + idx
        return flat >> 4, (flat & 15) << 2

    def record(self, key: int) -> None:
        """Count one occurrence of key; may trigger the periodic reset."""
        for row in range(self.depth):
            w, shift = self._slot(key, row)
            word = int(self.words[w])
            if (word >> shift) & 0xF < 15:
                self.words[w] = (word + (1 << shift)) & MASK64
        self.op_count += 1
        if self.op_count >= self.sample_period:
            self.reset()

    def estimate(self, key: int) -> int:
        """Estimated frequency: minimum of the key's row counters (0..15)."""
        est = 15
        for row in range(self.depth):
            w, shift = self._slot(key, row)
            c = (int(self.words[w]) >> shift) & 0xF
            if c < est:
                est = c
        return est

    def reset(self) -> None:
        """Halve every counter and restart the sample window."""
        np.right_shift(self.words, 1, out=self.words)
        np.bitwise_and(self.words, np.uint64(_HALF_MASK), out=self.words)
        self.op_count = 0

    def admit(self, candidate_key: int, victim_key: int) -> bool:
        """True iff the candidate is strictly more frequent than the victim."""
        return self.estimate(candidate_key) > self.estimate(victim_key)
