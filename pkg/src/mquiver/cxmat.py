"""Dense complex linear algebra with explicit tolerances.

Matrices are plain ``numpy`` arrays of dtype complex128. Every rank or
invertibility decision uses a singular-value threshold relative to the largest
singular value of the operand.
"""
import os

import numpy as np
import scipy.linalg

from . import kernels
from .errors import SingularMatrix

DEFAULT_TOL = float(os.environ.get("MQUIVER_TOL", "1e-9"))
COND_MAX = 1e12
CLUSTER_TOL = 1e-6


def as_cmatrix(m, name="matrix"):
    """Coerce ``m`` to a finite 2-D complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def frozen(m):
    """Read-only copy; values stored on domain objects go through this."""
    arr = np.array(as_cmatrix(m), dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def identity(n):
    return np.eye(n, dtype=np.complex128)


def _require_square(m, name="matrix"):
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")


def fro(m):
    return float(np.linalg.norm(m))


def cond(m):
    """2-norm condition number (inf when singular)."""
    m = as_cmatrix(m)
    if m.size == 0:
        return 1.0
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


def inverse(m, tol=DEFAULT_TOL):
    """Return ``(m^-1, condition estimate)``.

    Raises SingularMatrix if the smallest singular value is at most
    ``tol`` times the largest, or the condition number exceeds COND_MAX.
    """
    m = as_cmatrix(m)
    _require_square(m)
    n = m.shape[0]
    if n == 0:
        return m.copy(), 1.0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= tol * s[0]:
        raise SingularMatrix(
            f"matrix is singular to tolerance {tol:g} (sigma_min={s[-1]:.3e}, sigma_max={s[0]:.3e})",
            cond=np.inf,
        )
    c = float(s[0] / s[-1])
    if c > COND_MAX:
        raise SingularMatrix(f"condition number {c:.3e} exceeds {COND_MAX:g}", cond=c)
    return np.linalg.inv(m), c


def is_invertible(m, tol=DEFAULT_TOL):
    try:
        inverse(m, tol)
    except SingularMatrix:
        return False
    return True


def rank_kernel(m, tol=DEFAULT_TOL):
    """Numerical rank and an orthonormal kernel basis (as columns).

    ``rank + kernel.shape[1] == m.shape[1]`` always holds.
    """
    m = as_cmatrix(m)
    rows, cols = m.shape
    if cols == 0:
        return 0, np.zeros((0, 0), dtype=np.complex128)
    if rows == 0:
        return 0, identity(cols)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > tol * smax)) if smax > 0.0 else 0
    return rank, vh[rank:].conj().T.copy()


def rank(m, tol=DEFAULT_TOL):
    return rank_kernel(m, tol)[0]


def char_poly(m):
    """Coefficients c_1..c_n with det(tI - m) = t^n + c_1 t^(n-1) + ... + c_n."""
    m = as_cmatrix(m)
    _require_square(m)
    if m.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    return kernels.char_poly(m)


def linear_factor_product(m, roots):
    """Product (m - r_1 I)(m - r_2 I)... and the product of factor norms."""
    m = as_cmatrix(m)
    _require_square(m)
    return kernels.linear_factor_product(m, np.asarray(roots, dtype=np.complex128))


def eigen_clusters(m, tol=CLUSTER_TOL):
    """Group the eigenvalues of ``m`` by single linkage at relative distance ``tol``.

    Returns a list of 1-D arrays; together they hold every eigenvalue once.
    """
    m = as_cmatrix(m)
    _require_square(m)
    eigs = np.linalg.eigvals(m)
    if eigs.size == 0:
        return []
    radius = tol * max(1.0, float(np.max(np.abs(eigs))))
    parent = list(range(eigs.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(eigs.size):
        for j in range(i + 1, eigs.size):
            if abs(eigs[i] - eigs[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(eigs.size):
        groups.setdefault(find(i), []).append(eigs[i])
    return [np.array(g) for g in groups.values()]


def generalized_eigenspace(m, tau, tol=CLUSTER_TOL):
    """Orthonormal basis (columns) of the generalized eigenspace of ``m`` at ``tau``.

    Eigenvalues are clustered at relative distance ``tol``; the cluster whose
    nearest member lies within that distance of ``tau`` is selected and its
    invariant subspace read off an ordered complex Schur form. An empty
    ``(n, 0)`` basis is returned when ``tau`` is not an eigenvalue.
    """
    m = as_cmatrix(m)
    _require_square(m)
    n = m.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    eigs = np.linalg.eigvals(m)
    radius = tol * max(1.0, float(np.max(np.abs(eigs))))
    clusters = eigen_clusters(m, tol)
    chosen = None
    best = np.inf
    for cl in clusters:
        d = float(np.min(np.abs(cl - tau)))
        if d <= radius and d < best:
            chosen, best = cl, d
    if chosen is None:
        return np.zeros((n, 0), dtype=np.complex128)
    if chosen.size == n:
        return identity(n)

    def selected(x):
        # nearest computed eigenvalue decides membership
        nearest = eigs[np.argmin(np.abs(eigs - x))]
        return bool(np.min(np.abs(chosen - nearest)) == 0.0)

    _, z, sdim = scipy.linalg.schur(m, output="complex", sort=selected)
    return np.ascontiguousarray(z[:, :sdim])


def generalized_eigenspace_by_power(m, tau, tol=DEFAULT_TOL):
    """Kernel of (m - tau I)^n at singular-value tolerance ``tol``.

    Literal definition; it is reliable only when the other eigenvalues are
    well separated from ``tau``. Kept as a cross-check for
    :func:`generalized_eigenspace`.
    """
    m = as_cmatrix(m)
    _require_square(m)
    n = m.shape[0]
    shifted = m - tau * identity(n)
    power = np.linalg.matrix_power(shifted, n) if n else shifted
    return rank_kernel(power, tol)[1]


def projector(basis):
    """Orthogonal projector onto the span of orthonormal columns."""
    return basis @ basis.conj().T


def subspace_distance(a, b):
    """Largest sine of the principal angles between two orthonormal bases.

    Returns 1.0 when the dimensions differ.
    """
    if a.shape[1] != b.shape[1]:
        return 1.0
    if a.shape[1] == 0:
        return 0.0
    resid = b - a @ (a.conj().T @ b)
    return float(np.linalg.norm(resid, 2))


# random generators used by tests, the CLI and gen_random

def random_complex(shape, rng, bound=1.0):
    """Entries with modulus uniform in [0, bound] and uniform phase."""
    r = rng.uniform(0.0, bound, size=shape)
    phi = rng.uniform(0.0, 2 * np.pi, size=shape)
    return r * np.exp(1j * phi)


def random_unitary(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_special_unitary(n, rng):
    u = random_unitary(n, rng)
    return u / np.linalg.det(u) ** (1.0 / n)


def random_special_linear(n, rng, cond_max=10.0):
    """Random element of SL(n, C) with 2-norm condition number at most ``cond_max``."""
    if n == 1:
        return np.ones((1, 1), dtype=np.complex128)
    s = np.exp(rng.uniform(0.0, np.log(cond_max), size=n))
    g = random_unitary(n, rng) @ np.diag(s) @ random_unitary(n, rng)
    return g / np.linalg.det(g) ** (1.0 / n)


def random_unitriangular(n, rng, bound=10.0):
    m = np.triu(random_complex((n, n), rng, bound), k=1)
    return m + identity(n)
