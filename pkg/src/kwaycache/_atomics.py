"""LLVM atomic operations on 1-D numpy arrays, exposed to numba kernels.

These intrinsics compile to real machine atomics (lock xadd / cmpxchg /
cmpxchg16b on x86-64), which is what lets the cache kernels run correctly on
plain numpy buffers shared across nogil threads.  ``*_pair`` operations act
on (arr[2*idx], arr[2*idx+1]) as a single 128-bit quantity; the array base
must be 16-byte aligned (see ``aligned_i64``).

Data-plane operations use monotonic ordering; the lock helpers use
acquire/release so critical-section accesses cannot be reordered out.
"""
from __future__ import annotations

import numpy as np
from llvmlite import ir
from numba import types
from numba.core import cgutils
from numba.extending import intrinsic


def aligned_i64(n: int, align: int = 16) -> np.ndarray:
    """Zeroed int64 array of length n whose base address is 16-byte aligned."""
    buf = np.zeros(n + align // 8, dtype=np.int64)
    off = (-buf.ctypes.data) % align // 8
    return buf[off:off + n]


def _item_ptr(context, builder, aryty, ary_v, idx_v):
    ary = context.make_array(aryty)(context, builder, ary_v)
    return cgutils.get_item_pointer(context, builder, aryty, ary, [idx_v])


def _rmw_intrinsic(op: str, ordering: str):
    @intrinsic
    def rmw(typingctx, arr, idx, val):
        if not isinstance(arr, types.Array) or arr.ndim != 1:
            return None
        sig = arr.dtype(arr, types.intp, arr.dtype)

        def codegen(context, builder, signature, args):
            ptr = _item_ptr(context, builder, signature.args[0], args[0], args[1])
            return builder.atomic_rmw(op, ptr, args[2], ordering)

        return sig, codegen

    return rmw


#: fetch-and-add, returning the previous value.
atomic_add = _rmw_intrinsic("add", "monotonic")
atomic_add_release = _rmw_intrinsic("add", "release")


def _cas_intrinsic(success_ordering: str):
    @intrinsic
    def cas(typingctx, arr, idx, expected, new):
        if not isinstance(arr, types.Array) or arr.ndim != 1:
            return None
        sig = types.boolean(arr, types.intp, arr.dtype, arr.dtype)

        def codegen(context, builder, signature, args):
            ptr = _item_ptr(context, builder, signature.args[0], args[0], args[1])
            pair = builder.cmpxchg(ptr, args[2], args[3], success_ordering, "monotonic")
            return builder.extract_value(pair, 1)

        return sig, codegen

    return cas


atomic_cas = _cas_intrinsic("monotonic")
atomic_cas_acquire = _cas_intrinsic("acquire")


def _load_intrinsic(ordering: str):
    @intrinsic
    def load(typingctx, arr, idx):
        if not isinstance(arr, types.Array) or arr.ndim != 1:
            return None
        sig = arr.dtype(arr, types.intp)

        def codegen(context, builder, signature, args):
            ptr = _item_ptr(context, builder, signature.args[0], args[0], args[1])
            itemsize = signature.return_type.bitwidth // 8
            return builder.load_atomic(ptr, ordering, align=itemsize)

        return sig, codegen

    return load


atomic_load = _load_intrinsic("monotonic")
atomic_load_acquire = _load_intrinsic("acquire")


def _store_intrinsic(ordering: str):
    @intrinsic
    def store(typingctx, arr, idx, val):
        if not isinstance(arr, types.Array) or arr.ndim != 1:
            return None
        sig = types.void(arr, types.intp, arr.dtype)

        def codegen(context, builder, signature, args):
            ptr = _item_ptr(context, builder, signature.args[0], args[0], args[1])
            itemsize = signature.args[2].bitwidth // 8
            builder.store_atomic(args[2], ptr, ordering, align=itemsize)
            return context.get_dummy_value()

        return sig, codegen

    return store


atomic_store = _store_intrinsic("monotonic")
atomic_store_release = _store_intrinsic("release")


_I64 = ir.IntType(64)
_I128 = ir.IntType(128)


def _pair_ptr(context, builder, aryty, ary_v, idx_v):
    base = builder.mul(idx_v, ir.Constant(idx_v.type, 2))
    ptr = _item_ptr(context, builder, aryty, ary_v, base)
    return builder.bitcast(ptr, _I128.as_pointer())


@intrinsic
def atomic_load_pair(typingctx, arr, idx):
    """Atomically read (arr[2*idx], arr[2*idx+1]) as one 128-bit load."""
    if not isinstance(arr, types.Array) or arr.dtype != types.int64 or arr.ndim != 1:
        return None
    sig = types.UniTuple(types.int64, 2)(arr, types.intp)

    def codegen(context, builder, signature, args):
        p128 = _pair_ptr(context, builder, signature.args[0], args[0], args[1])
        ld = builder.load_atomic(p128, "monotonic", align=16)
        lo = builder.trunc(ld, _I64)
        hi = builder.trunc(builder.lshr(ld, ir.Constant(_I128, 64)), _I64)
        return context.make_tuple(builder, signature.return_type, [lo, hi])

    return sig, codegen


@intrinsic
def atomic_cas_pair(typingctx, arr, idx, exp_lo, exp_hi, new_lo, new_hi):
    """128-bit compare-exchange of (arr[2*idx], arr[2*idx+1])."""
    if not isinstance(arr, types.Array) or arr.dtype != types.int64 or arr.ndim != 1:
        return None
    i64 = types.int64
    sig = types.boolean(arr, types.intp, i64, i64, i64, i64)

    def codegen(context, builder, signature, args):
        p128 = _pair_ptr(context, builder, signature.args[0], args[0], args[1])

        def widen(lo, hi):
            w = builder.zext(lo, _I128)
            h = builder.shl(builder.zext(hi, _I128), ir.Constant(_I128, 64))
            return builder.or_(w, h)

        pair = builder.cmpxchg(p128, widen(args[2], args[3]),
                               widen(args[4], args[5]), "monotonic", "monotonic")
        return builder.extract_value(pair, 1)

    return sig, codegen
