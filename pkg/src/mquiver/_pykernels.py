"""Numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, or when
``MQUIVER_PURE_PYTHON`` is set. Signatures and results match the compiled
module to rounding.
"""
import numpy as np


def char_poly(a):
    """Faddeev-LeVerrier coefficients c_1..c_n of det(tI - a)."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    n = a.shape[0]
    coeffs = np.empty(n, dtype=np.complex128)
    eye = np.eye(n, dtype=np.complex128)
    m = np.zeros((n, n), dtype=np.complex128)
    c_prev = 1.0 + 0.0j
    for k in range(1, n + 1):
        m = a @ m + c_prev * eye
        c_prev = -np.trace(a @ m) / k
        coeffs[k - 1] = c_prev
    return coeffs


def linear_factor_product(a, roots):
    """Return ((a - r_1)(a - r_2)..., prod of factor Frobenius norms)."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    prod = eye.copy()
    norm_prod = 1.0
    for r in roots:
        factor = a - r * eye
        norm_prod *= np.linalg.norm(factor)
        prod = prod @ factor
    return prod, norm_prod
