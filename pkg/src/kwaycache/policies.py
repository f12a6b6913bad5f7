"""Victim selection and metadata update rules for the five eviction policies.

Everything here is a pure function over a snapshot of one set; all
synchronization lives with the cache variants.  Victim comparisons are exact:
Hyperbolic priorities n/(t_e - t0) are ordered by integer cross
multiplication, never by floating point, so every implementation that follows
these rules picks the identical victim.
"""
from __future__ import annotations

from typing import Optional, Sequence

from .core import META_MAX, EntryRecord, Policy, SplitMix64

#: (occupied, meta, birth) triple describing one slot of a set.
SlotView = tuple[bool, int, int]


def hyperbolic_less(meta_a: int, age_a: int, meta_b: int, age_b: int) -> bool:
    """Exact comparison of meta_a/age_a < meta_b/age_b (ages >= 1)."""
    return meta_a * age_b < meta_b * age_a


def select_victim(
    set_view: Sequence[SlotView],
    policy: Policy,
    now: int,
    rng: Optional[SplitMix64] = None,
) -> Optional[int]:
    """Pick the eviction victim among a set snapshot, or None.

    Returns None when any slot is empty (the caller inserts into the first
    empty slot instead of evicting).  On a full set the victim is the slot
    with minimum policy priority; ties fall to the smaller birth time, then
    the smaller slot index.  Random needs ``rng`` and ignores tie-breaks.
    """
    first_empty = None
    for idx, (occupied, _, _) in enumerate(set_view):
        if not occupied:
            first_empty = idx
            break
    if first_empty is not None:
        return None

    k = len(set_view)
    if policy is Policy.RANDOM:
        if rng is None:
            raise ValueError("random policy needs an rng for victim selection")
        return rng.next_below(k)

    best = 0
    _, best_meta, best_birth = set_view[0]
    if policy is Policy.HYPERBOLIC:
        best_age = max(1, now - best_birth)
        for idx in range(1, k):
            _, meta, birth = set_view[idx]
            age = max(1, now - birth)
            if hyperbolic_less(meta, age, best_meta, best_age) or (
                not hyperbolic_less(best_meta, best_age, meta, age) and birth < best_birth
            ):
                best, best_meta, best_birth, best_age = idx, meta, birth, age
        return best

    # LRU, LFU and FIFO all reduce to argmin over the meta counter.
    for idx in range(1, k):
        _, meta, birth = set_view[idx]
        if meta < best_meta or (meta == best_meta and birth < best_birth):
            best, best_meta, best_birth = idx, meta, birth
    return best


def on_access(entry: EntryRecord, policy: Policy, now: int) -> int:
    """New meta value after a hit; FIFO and Random never touch it."""
    if policy is Policy.LRU:
        return now
    if policy is Policy.LFU or policy is Policy.HYPERBOLIC:
        return min(entry.meta + 1, META_MAX)
    return entry.meta


def on_insert(policy: Policy, now: int) -> tuple[int, int]:
    """Initial (meta, birth) for a fresh entry inserted at logical time now."""
    if policy is Policy.LFU or policy is Policy.HYPERBOLIC:
        return 1, now
    if policy is Policy.RANDOM:
        return 0, now
    return now, now  # LRU and FIFO both stamp the insertion time
