# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled summation kernels for the direct singular-integral quadratures.

Explicit-loop counterparts of the FFT-based fallback in ``_kernels_np``:
circular convolution of a field with a displacement-kernel table, and the
weighted absolute-difference double sum.  Loops are ordered so the inner
updates run over contiguous spans with independent accumulators.
"""

import numpy as np


def circular_convolve(u, kernel):
    """sum_k kernel[k] * u[(x - k) mod N] for every multi-index x."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    if u.shape != kernel.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {kernel.shape}")
    out = np.zeros_like(u)
    if u.ndim == 1:
        _conv1(u, kernel, out)
    elif u.ndim == 2:
        _conv2(u, kernel, out)
    elif u.ndim == 3:
        _conv3(u, kernel, out)
    else:
        raise ValueError(f"unsupported dimension {u.ndim}")
    return out


def weighted_abs_diff_sum(u, weight):
    """sum over displacements k of weight[k] * sum_x |u(x) - u(x + k)|."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    weight = np.ascontiguousarray(weight, dtype=np.float64)
    if u.shape != weight.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {weight.shape}")
    if u.ndim == 1:
        return _absdiff1(u, weight)
    if u.ndim == 2:
        return _absdiff2(u, weight)
    raise ValueError(f"unsupported dimension {u.ndim}")


cdef void _axpy_shift(double* acc, const double* src, double c, Py_ssize_t shift,
                      Py_ssize_t n) noexcept nogil:
    # acc[x] += c * src[(x - shift) mod n], split into two contiguous spans
    cdef Py_ssize_t x
    for x in range(shift, n):
        acc[x] += c * src[x - shift]
    for x in range(shift):
        acc[x] += c * src[x - shift + n]


cdef void _conv1(const double[::1] u, const double[::1] K, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t k
    cdef double c
    for k in range(n):
        c = K[k]
        if c != 0.0:
            _axpy_shift(&out[0], &u[0], c, k, n)


cdef void _conv2(const double[:, ::1] u, const double[:, ::1] K,
                 double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1]
    cdef Py_ssize_t x0, k0, k1, src0
    cdef double c
    for x0 in range(n0):
        for k0 in range(n0):
            src0 = x0 - k0
            if src0 < 0:
                src0 += n0
            for k1 in range(n1):
                c = K[k0, k1]
                if c != 0.0:
                    _axpy_shift(&out[x0, 0], &u[src0, 0], c, k1, n1)


cdef void _conv3(const double[:, :, ::1] u, const double[:, :, ::1] K,
                 double[:, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1], n2 = u.shape[2]
    cdef Py_ssize_t x0, x1, k0, k1, k2, src0, src1
    cdef double c
    for x0 in range(n0):
        for x1 in range(n1):
            for k0 in range(n0):
                src0 = x0 - k0
                if src0 < 0:
                    src0 += n0
                for k1 in range(n1):
                    src1 = x1 - k1
                    if src1 < 0:
                        src1 += n1
                    for k2 in range(n2):
                        c = K[k0, k1, k2]
                        if c != 0.0:
                            _axpy_shift(&out[x0, x1, 0], &u[src0, src1, 0], c, k2, n2)


cdef double _absdiff_shift(const double* a, const double* b, Py_ssize_t shift,
                           Py_ssize_t n) noexcept nogil:
    # sum_x |a[x] - b[(x + shift) mod n]|
    cdef Py_ssize_t x
    cdef double s = 0.0, d
    for x in range(n - shift):
        d = a[x] - b[x + shift]
        s += d if d >= 0.0 else -d
    for x in range(n - shift, n):
        d = a[x] - b[x + shift - n]
        s += d if d >= 0.0 else -d
    return s


cdef double _absdiff1(const double[::1] u, const double[::1] W) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t k
    cdef double total = 0.0, w
    for k in range(n):
        w = W[k]
        if w != 0.0:
            total += w * _absdiff_shift(&u[0], &u[0], k, n)
    return total


cdef double _absdiff2(const double[:, ::1] u, const double[:, ::1] W) noexcept nogil:
    cdef Py_ssize_t n0 = u.shape[0], n1 = u.shape[1]
    cdef Py_ssize_t k0, k1, x0, src0
    cdef double total = 0.0, w, s
    for k0 in range(n0):
        for k1 in range(n1):
            w = W[k0, k1]
            if w == 0.0:
                continue
            s = 0.0
            for x0 in range(n0):
                src0 = x0 + k0
                if src0 >= n0:
                    src0 -= n0
                s += _absdiff_shift(&u[x0, 0], &u[src0, 0], k1, n1)
            total += w * s
    return total
