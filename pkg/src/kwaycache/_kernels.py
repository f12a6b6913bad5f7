"""numba kernels realizing the concurrent cache variants on numpy arrays.

Layout: a cache of num_sets * ways slots is a structure of arrays.
``cells`` packs (key, value) as adjacent int64 pairs so one 128-bit atomic
covers both; ``meta``/``birth`` hold the per-slot policy counters; ``clocks``
one logical clock per set; ``fps`` the WFSC fingerprint array; ``locks`` the
LS per-set reader-writer word.  Key -1 marks an empty slot.

The scan/update rules mirror kwaycache.policies exactly (same tie-breaks,
same integer cross-multiplied Hyperbolic priorities, same splitmix RNG
stream), which the test suite pins by replaying identical traces through the
pure-Python reference and these kernels.

cfg word layout:
  0 num_sets | 1 ways | 2 policy | 3 variant | 4 admission
  5 set_seed | 6 fp_seed | 7 sketch width mask | 8 sketch period | 9 depth

stats stride is 8 int64 per thread id: hits, misses, integrity violations,
benchmark op count (one cache line apart to dodge false sharing).
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ._atomics import (
    atomic_add,
    atomic_add_release,
    atomic_cas,
    atomic_cas_acquire,
    atomic_cas_pair,
    atomic_load,
    atomic_load_pair,
    atomic_store,
    atomic_store_release,
)
from .core import GOLDEN, META_MAX, VALUE_SEED
from .core import Policy, Variant

# policy / variant codes used inside cfg arrays
P_LRU, P_LFU, P_FIFO, P_RANDOM, P_HYP = 0, 1, 2, 3, 4
V_WFA, V_WFSC, V_LS = 0, 1, 2
POLICY_CODE = {Policy.LRU: P_LRU, Policy.LFU: P_LFU, Policy.FIFO: P_FIFO,
               Policy.RANDOM: P_RANDOM, Policy.HYPERBOLIC: P_HYP}
VARIANT_CODE = {Variant.WFA: V_WFA, Variant.WFSC: V_WFSC, Variant.LS: V_LS}

# benchmark workload modes
M_TRACE, M_MISS100, M_HIT100, M_HIT95, M_HIT90 = 0, 1, 2, 3, 4

EMPTY = np.int64(-1)
STATS_STRIDE = 8
MAX_THREADS = 64

_U1 = np.uint64(1)
_U2 = np.uint64(2)
_U4 = np.uint64(4)
_U15 = np.uint64(15)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_UMIX_A = np.uint64(0xBF58476D1CE4E5B9)
_UMIX_B = np.uint64(0x94D049BB133111EB)
_UGOLDEN = np.uint64(GOLDEN)
_UVALSEED = np.uint64(VALUE_SEED)
_UHALF = np.uint64(0x7777777777777777)
_META_MAX = np.int64(META_MAX)


@njit(inline="always")
def _mix64(x):
    x = (x ^ (x >> _U30)) * _UMIX_A
    x = (x ^ (x >> _U27)) * _UMIX_B
    return x ^ (x >> _U31)


@njit(inline="always")
def _hash64(key_u, seed_u):
    return _mix64(key_u + seed_u)


@njit(inline="always")
def _value_for(key):
    return np.int64(_mix64(np.uint64(key) + _UVALSEED))


@njit(inline="always")
def _set_of(key, seed, num_sets):
    h = _hash64(np.uint64(key), np.uint64(seed))
    return np.int64(h & np.uint64(num_sets - 1))


@njit(inline="always")
def _rng_below(rng, n):
    old = atomic_add(rng, 0, _UGOLDEN)
    return np.int64(_mix64(old + _UGOLDEN) % np.uint64(n))


# -- admission sketch (packed 4-bit counters, 16 per word) -------------------

@njit(inline="always")
def _sk_pos(key_u, seed_u, width_mask, row):
    idx = _hash64(key_u, seed_u) & width_mask
    flat = np.uint64(row) * (width_mask + _U1) + idx
    return np.int64(flat >> _U4), (flat & _U15) << _U2


@njit(inline="always")
def _sk_reset(words):
    for i in range(words.shape[0]):
        cur = atomic_load(words, i)
        atomic_store(words, i, (cur >> _U1) & _UHALF)


@njit(inline="always")
def _sk_record(words, seeds, width_mask, depth, state, period, key_u):
    for r in range(depth):
        w, shift = _sk_pos(key_u, seeds[r], width_mask, r)
        for _ in range(3):  # bounded retry keeps record wait-free
            cur = atomic_load(words, w)
            if ((cur >> shift) & _U15) >= _U15:
                break
            if atomic_cas(words, w, cur, cur + (_U1 << shift)):
                break
    old = atomic_add(state, 0, 1)
    if old + 1 == period:
        _sk_reset(words)
        atomic_store(state, 0, 0)


@njit(inline="always")
def _sk_estimate(words, seeds, width_mask, depth, key_u):
    est = _U15
    for r in range(depth):
        w, shift = _sk_pos(key_u, seeds[r], width_mask, r)
        c = (atomic_load(words, w) >> shift) & _U15
        if c < est:
            est = c
    return est


# -- victim selection ---------------------------------------------------------

@njit(inline="always")
def _clamp(m):
    return _META_MAX if m > _META_MAX else m


@njit
def _scan_victim(meta, birth, base, ways, policy, now, n_off):
    """Full-set victim slot: policy argmin, ties to min birth then min index.

    Hyperbolic compares n/(now-birth) by integer cross multiplication, so the
    ordering is exact and identical to the reference implementation.
    """
    best = 0
    bm = _clamp(meta[base])
    bb = birth[base]
    if policy == P_HYP:
        ba = now - bb
        if ba < 1:
            ba = np.int64(1)
        bn = bm + n_off
        for i in range(1, ways):
            m = _clamp(meta[base + i])
            b = birth[base + i]
            a = now - b
            if a < 1:
                a = np.int64(1)
            n = m + n_off
            left = n * ba
            right = bn * a
            if left < right or (left == right and b < bb):
                best, bm, bb, ba, bn = i, m, b, a, n
        return base + best
    for i in range(1, ways):
        m = _clamp(meta[base + i])
        b = birth[base + i]
        if m < bm or (m == bm and b < bb):
            best, bm, bb = i, m, b
    return base + best


# -- LS per-set reader-writer spinlock ---------------------------------------
# lock word: bit0 = writer held, upper bits = 2 * reader count

@njit(inline="always")
def _read_lock(locks, s):
    while True:
        st = atomic_load(locks, s)
        if st & 1 == 0:
            if atomic_cas_acquire(locks, s, st, st + 2):
                return


@njit(inline="always")
def _read_unlock(locks, s):
    atomic_add_release(locks, s, -2)


@njit(inline="always")
def _try_upgrade(locks, s):
    # Succeeds only for a sole reader, mirroring a failed-is-benign convert.
    return atomic_cas_acquire(locks, s, 2, 1)


@njit(inline="always")
def _write_unlock(locks, s):
    atomic_store_release(locks, s, 0)


# -- get / put ----------------------------------------------------------------

@njit
def _get_impl(cfg, cells, meta, birth, clocks, fps, locks,
              skw, sks, skst, rng, stats, key, tid):
    ways = cfg[1]
    policy = cfg[2]
    variant = cfg[3]
    s = _set_of(key, cfg[5], cfg[0])
    now = atomic_add(clocks, s, 1) + 1
    if cfg[4] == 1:
        _sk_record(skw, sks, np.uint64(cfg[7]), cfg[9], skst, cfg[8], np.uint64(key))
    base = s * ways
    sbase = tid * STATS_STRIDE

    if variant == V_LS:
        _read_lock(locks, s)
        for i in range(ways):
            slot = base + i
            if cells[2 * slot] == key:
                val = cells[2 * slot + 1]
                if _try_upgrade(locks, s):
                    if policy == P_LRU:
                        meta[slot] = now
                    elif policy == P_LFU or policy == P_HYP:
                        meta[slot] = meta[slot] + 1
                    _write_unlock(locks, s)
                else:
                    _read_unlock(locks, s)  # lost recency update is benign
                stats[sbase] += 1
                return True, val
        _read_unlock(locks, s)
        stats[sbase + 1] += 1
        return False, np.int64(0)

    if variant == V_WFSC:
        fp = np.int64(_hash64(np.uint64(key), np.uint64(cfg[6])))
        for i in range(ways):
            slot = base + i
            if fps[slot] == fp:
                k, v = atomic_load_pair(cells, slot)
                if k == key:  # fingerprint match is only a hint
                    if policy == P_LRU:
                        atomic_store(meta, slot, now)
                    elif policy == P_LFU or policy == P_HYP:
                        atomic_add(meta, slot, 1)
                    stats[sbase] += 1
                    return True, v
        stats[sbase + 1] += 1
        return False, np.int64(0)

    for i in range(ways):
        slot = base + i
        k, v = atomic_load_pair(cells, slot)
        if k == key:
            if policy == P_LRU:
                atomic_store(meta, slot, now)
            elif policy == P_LFU or policy == P_HYP:
                atomic_add(meta, slot, 1)
            stats[sbase] += 1
            return True, v
    stats[sbase + 1] += 1
    return False, np.int64(0)


@njit(inline="always")
def _insert_meta(policy, variant, now):
    # WFSC stores hits-since-insert (0 on install, per its parallel-counter
    # contract); the other variants store the policy's 1-based initial value.
    if policy == P_LFU or policy == P_HYP:
        return np.int64(0) if variant == V_WFSC else np.int64(1)
    if policy == P_RANDOM:
        return np.int64(0)
    return now


@njit
def _put_ls(cfg, cells, meta, birth, clocks, fps, locks,
            skw, sks, skst, rng, stats, key, value, tid, forced, s, now):
    ways = cfg[1]
    policy = cfg[2]
    base = s * ways
    _read_lock(locks, s)
    key_slot = np.int64(-1)
    empty_slot = np.int64(-1)
    for i in range(ways):
        slot = base + i
        k = cells[2 * slot]
        if k == key:
            key_slot = slot
            break
        if k == EMPTY and empty_slot < 0:
            empty_slot = slot
    if key_slot >= 0:
        if _try_upgrade(locks, s):
            cells[2 * key_slot + 1] = value
            if policy == P_LRU:
                meta[key_slot] = now
            elif policy == P_LFU or policy == P_HYP:
                meta[key_slot] = meta[key_slot] + 1
            _write_unlock(locks, s)
        else:
            _read_unlock(locks, s)  # dropped update is within contract
        return
    if not _try_upgrade(locks, s):
        _read_unlock(locks, s)
        return
    if empty_slot >= 0:
        slot = empty_slot
    else:
        if policy == P_RANDOM:
            slot = base + _rng_below(rng, ways)
        else:
            slot = _scan_victim(meta, birth, base, ways, policy, now, 0)
        if cfg[4] == 1 and not forced:
            wm = np.uint64(cfg[7])
            cand = _sk_estimate(skw, sks, wm, cfg[9], np.uint64(key))
            vict = _sk_estimate(skw, sks, wm, cfg[9], np.uint64(cells[2 * slot]))
            if cand <= vict:
                _write_unlock(locks, s)
                return
    cells[2 * slot] = key
    cells[2 * slot + 1] = value
    meta[slot] = _insert_meta(policy, V_LS, now)
    birth[slot] = now
    _write_unlock(locks, s)


@njit
def _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
              skw, sks, skst, rng, stats, key, value, tid, forced):
    ways = cfg[1]
    policy = cfg[2]
    variant = cfg[3]
    s = _set_of(key, cfg[5], cfg[0])
    now = atomic_add(clocks, s, 1) + 1
    if variant == V_LS:
        _put_ls(cfg, cells, meta, birth, clocks, fps, locks,
                skw, sks, skst, rng, stats, key, value, tid, forced, s, now)
        return
    base = s * ways

    fp = np.int64(0)
    if variant == V_WFSC:
        fp = np.int64(_hash64(np.uint64(key), np.uint64(cfg[6])))

    key_slot = np.int64(-1)
    old_val = np.int64(0)
    empty_slot = np.int64(-1)
    for i in range(ways):
        slot = base + i
        if variant == V_WFSC:
            k = cells[2 * slot]
            if k == EMPTY:
                if empty_slot < 0:
                    empty_slot = slot
            elif fps[slot] == fp:
                kk, vv = atomic_load_pair(cells, slot)
                if kk == key:
                    key_slot, old_val = slot, vv
                    break
        else:
            k, v = atomic_load_pair(cells, slot)
            if k == key:
                key_slot, old_val = slot, v
                break
            if k == EMPTY and empty_slot < 0:
                empty_slot = slot

    if key_slot >= 0:
        if atomic_cas_pair(cells, key_slot, key, old_val, key, value):
            if policy == P_LRU:
                atomic_store(meta, key_slot, now)
            elif policy == P_LFU or policy == P_HYP:
                atomic_add(meta, key_slot, 1)
        return  # failed exchange: deliberate silent drop

    if empty_slot >= 0:
        if atomic_cas_pair(cells, empty_slot, EMPTY, 0, key, value):
            atomic_store(meta, empty_slot, _insert_meta(policy, variant, now))
            atomic_store(birth, empty_slot, now)
            if variant == V_WFSC:
                fps[empty_slot] = fp
        return

    if policy == P_RANDOM:
        vslot = base + _rng_below(rng, ways)
    else:
        n_off = np.int64(1) if (variant == V_WFSC and (policy == P_LFU or policy == P_HYP)) else np.int64(0)
        vslot = _scan_victim(meta, birth, base, ways, policy, now, n_off)
    vk, vv = atomic_load_pair(cells, vslot)
    if vk == EMPTY:
        return
    if cfg[4] == 1 and not forced:
        wm = np.uint64(cfg[7])
        cand = _sk_estimate(skw, sks, wm, cfg[9], np.uint64(key))
        vict = _sk_estimate(skw, sks, wm, cfg[9], np.uint64(vk))
        if cand <= vict:
            return
    if atomic_cas_pair(cells, vslot, vk, vv, key, value):
        atomic_store(meta, vslot, _insert_meta(policy, variant, now))
        atomic_store(birth, vslot, now)
        if variant == V_WFSC:
            fps[vslot] = fp


# -- public kernels -----------------------------------------------------------

@njit(nogil=True, cache=True)
def k_get(cfg, cells, meta, birth, clocks, fps, locks,
          skw, sks, skst, rng, stats, key, tid):
    return _get_impl(cfg, cells, meta, birth, clocks, fps, locks,
                     skw, sks, skst, rng, stats, key, tid)


@njit(nogil=True, cache=True)
def k_put(cfg, cells, meta, birth, clocks, fps, locks,
          skw, sks, skst, rng, stats, key, value, tid, forced):
    _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
              skw, sks, skst, rng, stats, key, value, tid, forced)


@njit(nogil=True, cache=True)
def k_replay(cfg, cells, meta, birth, clocks, fps, locks,
             skw, sks, skst, rng, stats, keys, tid):
    """get-then-put-on-miss replay of a whole key stream."""
    for j in range(keys.shape[0]):
        key = keys[j]
        found, _ = _get_impl(cfg, cells, meta, birth, clocks, fps, locks,
                             skw, sks, skst, rng, stats, key, tid)
        if not found:
            _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
                      skw, sks, skst, rng, stats, key, _value_for(key), tid, False)


@njit(nogil=True, cache=True)
def k_warm_fill(cfg, cells, meta, birth, fps, base_key):
    """Directly fill every slot with a distinct filler entry at time zero."""
    variant = cfg[3]
    policy = cfg[2]
    for slot in range(meta.shape[0]):
        key = base_key + slot
        cells[2 * slot] = key
        cells[2 * slot + 1] = _value_for(key)
        meta[slot] = _insert_meta(policy, variant, np.int64(0))
        birth[slot] = 0
        if variant == V_WFSC:
            fps[slot] = np.int64(_hash64(np.uint64(key), np.uint64(cfg[6])))


@njit(nogil=True, cache=True)
def k_warm_wave(cfg, cells, meta, birth, clocks, fps, locks,
                skw, sks, skst, rng, stats, start_key, count, tid):
    """Per-thread warm-up wave: forced inserts through the normal put path."""
    for i in range(count):
        key = start_key + i
        _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
                  skw, sks, skst, rng, stats, key, _value_for(key), tid, True)


@njit(nogil=True, cache=True)
def k_bench_worker(cfg, cells, meta, birth, clocks, fps, locks,
                   skw, sks, skst, rng, stats,
                   mode, stream, lo, hi, resident, fresh_start, rng_seed,
                   stop_flag, tid):
    """Timed mixed get/put loop; checks the stop flag every 64 operations.

    Counts completed operations into the thread's stats slot and verifies
    value integrity (every hit must return the canonical mix of its key).
    """
    ops = np.int64(0)
    pos = lo
    fresh = fresh_start
    state = np.uint64(rng_seed)
    rcount = resident.shape[0]
    sbase = tid * STATS_STRIDE
    step = np.int64(0)
    while True:
        for _ in range(64):
            if mode == M_TRACE:
                key = stream[pos]
                pos += 1
                if pos >= hi:
                    pos = lo
                found, v = _get_impl(cfg, cells, meta, birth, clocks, fps, locks,
                                     skw, sks, skst, rng, stats, key, tid)
                ops += 1
                if found:
                    if v != _value_for(key):
                        stats[sbase + 2] += 1
                else:
                    _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
                              skw, sks, skst, rng, stats, key, _value_for(key),
                              tid, False)
                    ops += 1
            elif mode == M_MISS100:
                key = fresh
                fresh += 1
                found, v = _get_impl(cfg, cells, meta, birth, clocks, fps, locks,
                                     skw, sks, skst, rng, stats, key, tid)
                ops += 1
                if found and v != _value_for(key):
                    stats[sbase + 2] += 1
                if not found:
                    _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
                              skw, sks, skst, rng, stats, key, _value_for(key),
                              tid, False)
                    ops += 1
            else:
                fresh_turn = False
                if mode == M_HIT95:
                    fresh_turn = step == 19
                    step = step + 1 if step < 19 else np.int64(0)
                elif mode == M_HIT90:
                    fresh_turn = step == 9
                    step = step + 1 if step < 9 else np.int64(0)
                if fresh_turn:
                    key = fresh
                    fresh += 1
                else:
                    state += _UGOLDEN
                    key = resident[np.int64(_mix64(state) % np.uint64(rcount))]
                found, v = _get_impl(cfg, cells, meta, birth, clocks, fps, locks,
                                     skw, sks, skst, rng, stats, key, tid)
                ops += 1
                if found and v != _value_for(key):
                    stats[sbase + 2] += 1
                if fresh_turn and not found:
                    _put_impl(cfg, cells, meta, birth, clocks, fps, locks,
                              skw, sks, skst, rng, stats, key, _value_for(key),
                              tid, False)
                    ops += 1
        stats[sbase + 3] = ops
        if atomic_load(stop_flag, 0) == 1:
            return


@njit(nogil=True, cache=True)
def k_balls_in_bins(num_sets, ways, items, trials, seed, set_seed, occupancy):
    """Monte-Carlo occupancy trials: hash fresh random keys into sets and
    succeed when no set exceeds its ways."""
    successes = np.int64(0)
    for t in range(trials):
        occupancy[:] = 0
        state = _mix64(np.uint64(seed) ^ np.uint64(t + 1))
        ok = True
        for _ in range(items):
            state += _UGOLDEN
            key = _mix64(state)
            b = np.int64(_hash64(key, np.uint64(set_seed)) % np.uint64(num_sets))
            occupancy[b] += 1
            if occupancy[b] > ways:
                ok = False
                break
        if ok:
            successes += 1
    return successes


# -- sketch kernels (cross-checked against the pure-Python sketch) -----------

@njit(cache=True)
def k_sketch_record(words, seeds, width_mask, depth, state, period, key):
    _sk_record(words, seeds, np.uint64(width_mask), depth, state, period,
               np.uint64(key))


@njit(cache=True)
def k_sketch_estimate(words, seeds, width_mask, depth, key):
    return np.int64(_sk_estimate(words, seeds, np.uint64(width_mask), depth,
                                 np.uint64(key)))
