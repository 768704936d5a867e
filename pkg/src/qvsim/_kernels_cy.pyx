# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled strided-index state-vector kernels.

Same contract as ``_kernels_py``: flat complex128 input, fresh output,
no mutation.  Gate application walks the amplitude vector with integer
strides instead of reshaping, which removes the transpose/copy overhead
that dominates small-register workloads.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.complex128_t cplx
ctypedef cnp.int64_t i64


def _stride(dims, pos):
    s = 1
    for d in dims[pos + 1:]:
        s *= d
    return s


_offset_cache = {}


def _offsets(dims, targets):
    """Joint-index offset table and base-index array for the non-target
    digits, cached per (dims, targets)."""
    key = (dims, targets)
    hit = _offset_cache.get(key)
    if hit is not None:
        return hit
    tdims = [dims[t] for t in targets]
    strides = [_stride(dims, t) for t in targets]
    block = 1
    for d in tdims:
        block *= d
    off = np.zeros(block, dtype=np.int64)
    rem = np.arange(block, dtype=np.int64)
    for dk, sk in zip(reversed(tdims), reversed(strides)):
        off += (rem % dk) * sk
        rem //= dk

    # base indices: all indices with zero target digits, row-major in the
    # remaining digits
    rest = [(dims[i], _stride(dims, i)) for i in range(len(dims))
            if i not in targets]
    nbase = 1
    for dk, _ in rest:
        nbase *= dk
    base = np.zeros(nbase, dtype=np.int64)
    rem = np.arange(nbase, dtype=np.int64)
    for dk, sk in reversed(rest):
        base += (rem % dk) * sk
        rem //= dk
    _offset_cache[key] = (off, base)
    return off, base


def apply_unitary(amps, dims, targets, matrix):
    off_np, base_np = _offsets(dims, targets)
    cdef const cplx[::1] src = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef const cplx[:, ::1] u = np.ascontiguousarray(matrix, dtype=np.complex128)
    out_np = np.empty(len(amps), dtype=np.complex128)
    cdef cplx[::1] out = out_np
    cdef i64[::1] off = off_np
    cdef i64[::1] base = base_np
    cdef Py_ssize_t nb = base.shape[0], blk = off.shape[0]
    cdef Py_ssize_t a, i, j
    cdef i64 b
    cdef cplx acc
    for a in range(nb):
        b = base[a]
        for i in range(blk):
            acc = 0
            for j in range(blk):
                acc = acc + u[i, j] * src[b + off[j]]
            out[b + off[i]] = acc
    return out_np


def apply_permphase(amps, dims, targets, perm, phases):
    off_np, base_np = _offsets(dims, targets)
    cdef const cplx[::1] src = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef const i64[::1] pm = np.ascontiguousarray(perm, dtype=np.int64)
    cdef const cplx[::1] ph = np.ascontiguousarray(phases, dtype=np.complex128)
    out_np = np.empty(len(amps), dtype=np.complex128)
    cdef cplx[::1] out = out_np
    cdef i64[::1] off = off_np
    cdef i64[::1] base = base_np
    cdef Py_ssize_t nb = base.shape[0], blk = off.shape[0]
    cdef Py_ssize_t a, j
    cdef i64 b
    for a in range(nb):
        b = base[a]
        for j in range(blk):
            out[b + off[pm[j]]] = ph[j] * src[b + off[j]]
    return out_np


def subsystem_probs(amps, dims, target):
    off_np, base_np = _offsets(dims, (target,))
    cdef const cplx[::1] src = np.ascontiguousarray(amps, dtype=np.complex128)
    probs_np = np.zeros(dims[target], dtype=np.float64)
    cdef double[::1] probs = probs_np
    cdef i64[::1] off = off_np
    cdef i64[::1] base = base_np
    cdef Py_ssize_t nb = base.shape[0], d = off.shape[0]
    cdef Py_ssize_t a, q
    cdef i64 b
    cdef cplx z
    for a in range(nb):
        b = base[a]
        for q in range(d):
            z = src[b + off[q]]
            probs[q] += z.real * z.real + z.imag * z.imag
    return probs_np


def collapse(amps, dims, target, outcome):
    off_np, base_np = _offsets(dims, (target,))
    cdef const cplx[::1] src = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef i64[::1] base = base_np
    cdef Py_ssize_t nb = base.shape[0]
    out_np = np.empty(nb, dtype=np.complex128)
    cdef cplx[::1] out = out_np
    cdef i64 shift = off_np[outcome]
    cdef Py_ssize_t a
    for a in range(nb):
        out[a] = src[base[a] + shift]
    return out_np
