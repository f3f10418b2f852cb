# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer PSD kernel.

Same fraction-free scaled Schur recursion as ``_psd_pure``, over int64
with int128 intermediates.  Raises OverflowError when an intermediate
leaves the int64 range; callers then fall back to the pure bigint path.
"""

from libc.stdint cimport int64_t

cdef extern from *:
    ctypedef long long int128_t "__int128"

IMPL = "cython"

cdef int64_t I64_MAX = <int64_t>0x7FFFFFFFFFFFFFFF

DEF MAX_DIM = 16


cdef int _psd_core(int64_t* a, int size) except -1:
    cdef int64_t buf[MAX_DIM * MAX_DIM]
    cdef int i, j
    cdef int64_t p
    cdef int128_t tmp
    while size > 0:
        p = a[0]
        if p < 0:
            return 0
        if p == 0:
            for j in range(1, size):
                if a[j] != 0:
                    return 0
            # drop first row and column
            for i in range(1, size):
                for j in range(1, size):
                    buf[(i - 1) * (size - 1) + (j - 1)] = a[i * size + j]
            size -= 1
            for i in range(size * size):
                a[i] = buf[i]
            continue
        for i in range(1, size):
            for j in range(1, size):
                tmp = (<int128_t>a[i * size + j]) * p - (
                    <int128_t>a[i * size]
                ) * a[j]
                if tmp > I64_MAX or tmp < -I64_MAX - 1:
                    raise OverflowError("psd kernel intermediate exceeds int64")
                buf[(i - 1) * (size - 1) + (j - 1)] = <int64_t>tmp
        size -= 1
        for i in range(size * size):
            a[i] = buf[i]
    return 1


def psd_int(entries, int dim):
    """Exact PSD test for a symmetric int64 matrix given row-major."""
    cdef int64_t work[MAX_DIM * MAX_DIM]
    cdef int i
    if dim > MAX_DIM:
        raise OverflowError(f"dimension {dim} exceeds compiled kernel limit")
    for i in range(dim * dim):
        work[i] = entries[i]
    return _psd_core(work, dim) == 1


def psd_int_many(mats, int dim):
    """Batch over an iterable of flat int sequences."""
    cdef int64_t work[MAX_DIM * MAX_DIM]
    cdef int i
    if dim > MAX_DIM:
        raise OverflowError(f"dimension {dim} exceeds compiled kernel limit")
    out = []
    for m in mats:
        for i in range(dim * dim):
            work[i] = m[i]
        out.append(_psd_core(work, dim) == 1)
    return out
