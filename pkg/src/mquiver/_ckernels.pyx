# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled small-matrix kernels; see _pykernels for the reference versions."""
import numpy as np
from libc.math cimport sqrt


cdef void _matmul(const double complex[:, ::1] a, const double complex[:, ::1] b,
                  double complex[:, ::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double complex s
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s = s + a[i, k] * b[k, j]
            out[i, j] = s


def char_poly(a):
    """Faddeev-LeVerrier coefficients c_1..c_n of det(tI - a)."""
    cdef const double complex[:, ::1] A = np.ascontiguousarray(a, dtype=np.complex128)
    cdef Py_ssize_t n = A.shape[0]
    coeffs_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] coeffs = coeffs_arr
    cdef double complex[:, ::1] M = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] T = np.zeros((n, n), dtype=np.complex128)
    cdef double complex c_prev = 1.0
    cdef double complex tr
    cdef Py_ssize_t i, j, k
    with nogil:
        for k in range(1, n + 1):
            _matmul(A, M, T, n)
            for i in range(n):
                T[i, i] = T[i, i] + c_prev
            M[:, :] = T
            tr = 0
            for i in range(n):
                for j in range(n):
                    tr = tr + A[i, j] * M[j, i]
            c_prev = -tr / <double>k
            coeffs[k - 1] = c_prev
    return coeffs_arr


def linear_factor_product(a, roots):
    """Return ((a - r_1)(a - r_2)..., prod of factor Frobenius norms)."""
    cdef const double complex[:, ::1] A = np.ascontiguousarray(a, dtype=np.complex128)
    cdef const double complex[::1] R = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t nr = R.shape[0]
    prod_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] P = prod_arr
    cdef double complex[:, ::1] T = np.empty((n, n), dtype=np.complex128)
    cdef double norm_prod = 1.0
    cdef double acc
    cdef double complex r, s, f
    cdef Py_ssize_t i, j, k, idx
    with nogil:
        for idx in range(nr):
            r = R[idx]
            acc = 0.0
            for i in range(n):
                for j in range(n):
                    f = A[i, j] - r if i == j else A[i, j]
                    acc = acc + f.real * f.real + f.imag * f.imag
            norm_prod = norm_prod * sqrt(acc)
            for i in range(n):
                for j in range(n):
                    s = -r * P[i, j]
                    for k in range(n):
                        s = s + P[i, k] * A[k, j]
                    T[i, j] = s
            P[:, :] = T
    return prod_arr, norm_prod
