"""The double SL(n) x SL(n), its right N-action, and Steinberg fibres.

Class functions are the characteristic-polynomial coefficients c_1..c_{n-1};
for SL(n, C) these generate the invariant ring.
"""
from dataclasses import dataclass

import numpy as np

from . import cxmat
from .cxmat import DEFAULT_TOL, fro
from .errors import InvalidPoint, InvalidTorusLevel, NotBorel, NotUnipotent

DET_TOL = 1e-9
INDETERMINATE_BAND = 1e-6


@dataclass(frozen=True, eq=False)
class DoublePoint:
    """A pair (u, v) of SL(n, C); ``borel`` marks v as upper triangular."""

    u: np.ndarray
    v: np.ndarray
    borel: bool = False

    def __post_init__(self):
        u = cxmat.frozen(self.u)
        v = cxmat.frozen(self.v)
        if u.shape != v.shape or u.shape[0] != u.shape[1]:
            raise InvalidPoint(f"u and v must be square of equal size, got {u.shape} and {v.shape}")
        for name, m in (("u", u), ("v", v)):
            if abs(np.linalg.det(m) - 1) > DET_TOL * cxmat.cond(m):
                raise InvalidPoint(f"det {name} != 1")
        if self.borel and fro(np.tril(v, -1)) > 1e-12 * max(1.0, fro(v)):
            raise NotBorel("v is not upper triangular")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.u.shape[0]


@dataclass(frozen=True)
class TorusLevel:
    """Diagonal entries lambda_1..lambda_n with product 1."""

    lambdas: tuple

    def __post_init__(self):
        lam = tuple(complex(x) for x in self.lambdas)
        if not lam:
            raise InvalidTorusLevel("empty torus level")
        if any(x == 0 for x in lam):
            raise InvalidTorusLevel("torus level entries must be nonzero")
        if abs(np.prod(lam) - 1) > DET_TOL:
            raise InvalidTorusLevel(f"product of entries is {np.prod(lam)}, not 1")
        object.__setattr__(self, "lambdas", lam)

    @property
    def n(self):
        return len(self.lambdas)

    def matrix(self):
        return np.diag(np.array(self.lambdas, dtype=np.complex128))


def _level(lam):
    return lam if isinstance(lam, TorusLevel) else TorusLevel(tuple(lam))


def double_moment_map(p, tol=DEFAULT_TOL):
    """(u, v) -> (u v u^-1, v^-1)."""
    u_inv, _ = cxmat.inverse(p.u, tol)
    v_inv, _ = cxmat.inverse(p.v, tol)
    return p.u @ p.v @ u_inv, v_inv


def is_unitriangular(m, tol=1e-12):
    m = cxmat.as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, fro(m))
    return (
        fro(np.tril(m, -1)) <= tol * scale
        and float(np.max(np.abs(np.diagonal(m) - 1), initial=0.0)) <= tol * scale
    )


def n_action(p, n_elt, tol=DEFAULT_TOL):
    """Right N-action (u, v) -> (u n^-1, n v n^-1)."""
    n_elt = cxmat.as_cmatrix(n_elt, "n")
    if n_elt.shape != p.u.shape or not is_unitriangular(n_elt):
        raise NotUnipotent("n must be upper unitriangular of matching size")
    n_inv, _ = cxmat.inverse(n_elt, tol)
    return DoublePoint(p.u @ n_inv, n_elt @ p.v @ n_inv, p.borel)


def psi(p):
    """Project (u, v) to the diagonal of the Borel factor v."""
    if not p.borel:
        raise NotBorel("psi needs a point whose v lies in B")
    return TorusLevel(tuple(np.diagonal(p.v)))


def class_functions(m):
    """c_1..c_{n-1} of det(tI - m); c_n is fixed by det m = 1."""
    return cxmat.char_poly(m)[:-1]


def steinberg_membership(m, lam):
    """Largest |c_k(m) - c_k(diag lambda)| / (1 + |c_k(diag lambda)|)."""
    lam = _level(lam)
    m = cxmat.as_cmatrix(m)
    if m.shape != (lam.n, lam.n):
        raise InvalidPoint(f"matrix shape {m.shape} does not match level of size {lam.n}")
    ref = class_functions(lam.matrix())
    got = class_functions(m)
    if ref.size == 0:
        return 0.0
    return float(np.max(np.abs(got - ref) / (1.0 + np.abs(ref))))


def springer_image(u, lam, n_part, tol=DEFAULT_TOL):
    """u (diag(lambda) n) u^-1 for unitriangular n."""
    lam = _level(lam)
    u = cxmat.as_cmatrix(u, "u")
    n_part = cxmat.as_cmatrix(n_part, "n")
    if not is_unitriangular(n_part) or n_part.shape != (lam.n, lam.n):
        raise NotUnipotent("n must be upper unitriangular of matching size")
    u_inv, _ = cxmat.inverse(u, tol)
    return u @ lam.matrix() @ n_part @ u_inv


def _traceless_basis(n):
    """Orthonormal basis (columns, column-major vec) of the traceless n x n matrices."""
    vec_id = np.eye(n, dtype=np.complex128).reshape(-1, order="F")[None, :]
    return cxmat.rank_kernel(vec_id, 0.5)[1]


def commutator_singular_values(m):
    """Singular values of X -> mX - Xm restricted to traceless X, largest first."""
    m = cxmat.as_cmatrix(m)
    n = m.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    # vec(mX - Xm) = (I kron m - m^T kron I) vec(X), column-major
    op = np.kron(eye, m) - np.kron(m.T, eye)
    if n == 1:
        return np.zeros(0)
    return np.linalg.svd(op @ _traceless_basis(n), compute_uv=False)


def _relative_singular_values(m):
    """Commutator singular values over ||m||_2, so near-scalar m is not mistaken for regular."""
    m = cxmat.as_cmatrix(m)
    sv = commutator_singular_values(m)
    scale = float(np.linalg.norm(m, 2)) if m.size else 0.0
    return sv / scale if scale > 0 else sv


def centralizer_dim(m, tol=DEFAULT_TOL):
    """Dimension of {X traceless : mX = Xm}."""
    return int(np.count_nonzero(_relative_singular_values(m) <= tol))


def regularity(m, tol=DEFAULT_TOL):
    """"regular", "irregular", or "indeterminate" (a singular value lies between tol and 1e-6)."""
    m = cxmat.as_cmatrix(m)
    n = m.shape[0]
    rel = _relative_singular_values(m)
    if np.any((rel > tol) & (rel <= INDETERMINATE_BAND)):
        return "indeterminate"
    return "regular" if int(np.count_nonzero(rel <= tol)) == n - 1 else "irregular"


def unipotent_residual(m):
    """||(m - I)^n||_F / ||m - I||_F^n, zero when m = I."""
    m = cxmat.as_cmatrix(m)
    n = m.shape[0]
    prod, norm_prod = cxmat.linear_factor_product(m, np.ones(n))
    if norm_prod == 0.0:
        return 0.0
    return fro(prod) / norm_prod
