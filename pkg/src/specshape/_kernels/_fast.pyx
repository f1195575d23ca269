# cython: language_level=3
"""Compiled kernels for pulse-train rendering and 16-QAM error counting.

Mirrors _ref.py exactly; tests assert bit-for-bit agreement.
"""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport ceil, exp, floor, sqrt

cnp.import_array()

BACKEND = "cython"

cdef double _SQRT10 = sqrt(10.0)
cdef double[4] _LEV = [-3.0 / _SQRT10, -1.0 / _SQRT10, 1.0 / _SQRT10, 3.0 / _SQRT10]
# bit errors between Gray labels of level indices a, b (Gray: 0,1,3,2)
cdef int[4][4] _BE = [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]]


cdef inline Py_ssize_t _hard(double x) nogil:
    cdef double u = (x * _SQRT10 + 3.0) / 2.0
    cdef long k = <long>floor(u + 0.5)
    if k < 0:
        k = 0
    elif k > 3:
        k = 3
    return k


def qam16_map(cnp.ndarray i_idx, cnp.ndarray q_idx):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] ii = np.ascontiguousarray(i_idx, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] qq = np.ascontiguousarray(q_idx, dtype=np.uint8)
    cdef Py_ssize_t n = ii.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    for k in range(n):
        out[k] = _LEV[ii[k]] + 1j * _LEV[qq[k]]
    return out


def qam16_bit_errors(cnp.ndarray z, cnp.ndarray i_idx, cnp.ndarray q_idx):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] ii = np.ascontiguousarray(i_idx, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] qq = np.ascontiguousarray(q_idx, dtype=np.uint8)
    cdef Py_ssize_t n = zz.shape[0]
    cdef long total = 0
    cdef Py_ssize_t k, a, b
    for k in range(n):
        a = _hard(zz[k].real)
        b = _hard(zz[k].imag)
        total += _BE[a][ii[k]] + _BE[b][qq[k]]
    return total


def qam16_bit_errors_per_bin(cnp.ndarray z, cnp.ndarray i_idx, cnp.ndarray q_idx,
                             cnp.ndarray out):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] ii = np.ascontiguousarray(i_idx, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] qq = np.ascontiguousarray(q_idx, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] acc = out
    cdef Py_ssize_t nsym = zz.shape[0], nbin = zz.shape[1]
    cdef long total = 0
    cdef long e
    cdef Py_ssize_t s, m, a, b
    for s in range(nsym):
        for m in range(nbin):
            a = _hard(zz[s, m].real)
            b = _hard(zz[s, m].imag)
            e = _BE[a][ii[s, m]] + _BE[b][qq[s, m]]
            acc[m] += e
            total += e
    return total


def render_gauss_pairs(Py_ssize_t n_samples, double sample_rate,
                       cnp.ndarray start_times, double beta, double delta_t):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] st = np.ascontiguousarray(start_times, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] env = np.zeros(n_samples)
    cdef Py_ssize_t p, i, i0, i1
    cdef double t0, t, u1, u2
    for p in range(st.shape[0]):
        t0 = st[p]
        i0 = <Py_ssize_t>ceil(t0 * sample_rate)
        if i0 < 0:
            i0 = 0
        i1 = <Py_ssize_t>floor((t0 + 2.0 * delta_t) * sample_rate) + 1
        if i1 > n_samples:
            i1 = n_samples
        for i in range(i0, i1):
            t = i / sample_rate - t0
            u1 = t - delta_t / 2.0
            u2 = t - 3.0 * delta_t / 2.0
            env[i] += exp(-beta * u1 * u1 / 2.0) + exp(-beta * u2 * u2 / 2.0)
    return env


def render_rects(Py_ssize_t n_samples, double sample_rate,
                 cnp.ndarray start_times, double width):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] st = np.ascontiguousarray(start_times, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] env = np.zeros(n_samples)
    cdef Py_ssize_t p, i, i0, i1
    cdef double t0
    for p in range(st.shape[0]):
        t0 = st[p]
        i0 = <Py_ssize_t>ceil(t0 * sample_rate)
        if i0 < 0:
            i0 = 0
        i1 = <Py_ssize_t>floor((t0 + width) * sample_rate) + 1
        if i1 > n_samples:
            i1 = n_samples
        for i in range(i0, i1):
            env[i] += 1.0
    return env
