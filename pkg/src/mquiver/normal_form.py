"""Borel normal forms for full-flag quivers with surjective betas.

Once every beta_i is put in the standard form ``(0 | I_i)`` the top
endomorphism Y is upper triangular with leading entry 1, and the quiver can be
rebuilt from Y alone. The group B (upper triangular, det 1) covers B_1
(upper triangular, leading entry 1) n-to-1 by dividing by the leading entry.
"""
from dataclasses import dataclass, field

import numpy as np

from . import cxmat
from .cxmat import DEFAULT_TOL, fro
from .errors import (
    DeterminantFixupFailed,
    InvalidBorel,
    InvalidQuiver,
    InvalidRootIndex,
    NotSurjective,
    NotUnitriangularLeading,
    ZeroDiagonal,
)
from .quiver import (
    GaugeElement,
    Quiver,
    ScalarChain,
    act_gauge,
    endo_Y,
    stability_report,
)

LOWER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BorelElement:
    """Upper-triangular matrix in B (``variant="B"``, det 1) or B_1 (``"B1"``, leading entry 1)."""

    m: np.ndarray
    variant: str = "B1"
    tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        m = cxmat.as_cmatrix(self.m, "Borel element")
        if m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidBorel(f"Borel element must be a non-empty square matrix, got {m.shape}")
        if self.variant not in ("B", "B1"):
            raise InvalidBorel(f"unknown variant {self.variant!r}")
        if fro(np.tril(m, -1)) > LOWER_TOL * max(1.0, fro(m)):
            raise InvalidBorel("matrix is not upper triangular")
        diag = np.diagonal(m)
        if np.any(diag == 0):
            raise ZeroDiagonal("Borel element has a zero diagonal entry")
        if self.variant == "B1" and abs(diag[0] - 1) > self.tol:
            raise NotUnitriangularLeading(f"leading entry {diag[0]} is not 1")
        if self.variant == "B" and abs(np.prod(diag) - 1) > self.tol:
            raise InvalidBorel(f"determinant {np.prod(diag)} is not 1")
        object.__setattr__(self, "m", cxmat.frozen(np.triu(m)))

    @property
    def n(self):
        return self.m.shape[0]

    @property
    def diagonal(self):
        return np.diagonal(self.m).copy()

    def det(self):
        return complex(np.prod(np.diagonal(self.m)))


def standard_beta(i):
    """(0 | I_i), shape i x (i+1)."""
    b = np.zeros((i, i + 1), dtype=np.complex128)
    b[:, 1:] = np.eye(i)
    return b


def _standardizer(beta, tol):
    """Return P in SL(i+1) with beta P^-1 = (0 | I_i)."""
    i = beta.shape[0]
    u, s, vh = np.linalg.svd(beta, full_matrices=True)
    if s[-1] <= tol * s[0]:
        raise NotSurjective(f"beta_{i} is not surjective")
    kernel = vh[-1].conj()
    right_inv = vh[:i].conj().T @ np.diag(1.0 / s) @ u.conj().T
    p_inv = np.column_stack([kernel, right_inv])
    d = np.linalg.det(p_inv)
    if d == 0 or not np.isfinite(d):
        raise DeterminantFixupFailed(f"cannot normalize determinant at level {i}")
    # rescaling the kernel column leaves beta P^-1 unchanged
    p_inv[:, 0] /= d
    return cxmat.inverse(p_inv)[0]


def reduce_to_standard(q, tol=DEFAULT_TOL):
    """Gauge a full-flag quiver with surjective betas into standard form.

    Works from the top level down: at level i a factor P in SL(i+1) puts
    beta_i in the form (0 | I), and diag(I, P) at the higher nodes keeps the
    betas already standardized. Returns ``(gauge, quiver)`` where the gauge
    lies in prod SL(i) x SL(n) and the quiver's betas are exactly (0 | I).
    The result is canonical only up to the residual N action.
    """
    if not q.is_full_flag:
        raise InvalidQuiver("reduce_to_standard needs a full-flag quiver")
    report = stability_report(q, tol)
    if not all(report.beta_surjective):
        bad = [i + 1 for i, ok in enumerate(report.beta_surjective) if not ok]
        raise NotSurjective(f"beta maps {bad} are not surjective")
    n = q.n
    factors = [cxmat.identity(d) for d in q.dims]
    cur = q
    for i in range(n - 1, 0, -1):
        p = _standardizer(cur.betas[i - 1], tol)
        step = []
        for node in range(1, n + 1):
            if node <= i:
                step.append(cxmat.identity(node))
            else:
                g = cxmat.identity(node)
                g[node - i - 1:, node - i - 1:] = p
                step.append(g)
        factors = [s @ f for s, f in zip(step, factors)]
        cur = act_gauge(cur, GaugeElement(tuple(step)))
    gauge = GaugeElement(tuple(factors), tol=1e-8)
    moved = act_gauge(q, gauge)
    betas = []
    for i, b in enumerate(moved.betas, start=1):
        target = standard_beta(i)
        if fro(b - target) > max(tol, 1e-8) * max(1.0, fro(b)):
            raise DeterminantFixupFailed(f"beta_{i} did not reach standard form (error {fro(b - target):.3e})")
        betas.append(target)
    return gauge, Quiver(q.dims, moved.alphas, tuple(betas), check=False)


def reconstruct_from_borel(y, tol=DEFAULT_TOL):
    """Standard-form quiver and scalars whose top endomorphism is ``y``.

    alpha_{n-1} is columns 2..n of Y - I; each lower level uses the lower-right
    block of the previous Y divided by its leading entry, which is the next q.
    """
    if not isinstance(y, BorelElement):
        y = BorelElement(y, "B1")
    if y.variant != "B1":
        raise NotUnitriangularLeading("reconstruction needs an element of B_1")
    n = y.n
    cur = np.array(y.m)
    cur[0, 0] = 1.0
    alphas = [None] * (n - 1)
    betas = [None] * (n - 1)
    qs = [None] * (n - 1)
    for k in range(n - 1, 0, -1):
        alphas[k - 1] = (cur - cxmat.identity(k + 1))[:, 1:]
        betas[k - 1] = standard_beta(k)
        sub = cur[1:, 1:]
        qk = sub[0, 0]
        if qk == 0:
            raise ZeroDiagonal(f"q_{k} would be zero")
        qs[k - 1] = complex(qk)
        cur = sub / qk
        cur[0, 0] = 1.0
    quiver = Quiver(tuple(range(1, n + 1)), tuple(alphas), tuple(betas))
    return quiver, ScalarChain(tuple(qs))


def cover_rho(b):
    """B -> B_1, dividing by the leading diagonal entry z_1."""
    if not isinstance(b, BorelElement):
        b = BorelElement(b, "B")
    z1 = b.m[0, 0]
    out = BorelElement(b.m / z1, "B1")
    check = z1 ** b.n * out.det()
    if abs(check - 1) > 1e-10 * max(1.0, abs(z1) ** b.n):
        raise InvalidBorel(f"z_1^n det(rho(b)) = {check}, expected 1")
    return out


def lift_roots(y):
    """The n values z_1 with z_1^n = (det Y)^-1, counterclockwise from the principal root."""
    if not isinstance(y, BorelElement):
        y = BorelElement(y, "B1")
    n = y.n
    c = 1.0 / y.det()
    principal = c ** (1.0 / n)
    return [principal * np.exp(2j * np.pi * k / n) for k in range(n)]


def cover_lifts(y):
    """All n preimages z_1 Y of ``y`` under :func:`cover_rho`."""
    if not isinstance(y, BorelElement):
        y = BorelElement(y, "B1")
    return [BorelElement(z * y.m, "B") for z in lift_roots(y)]


def tilde_scalars(s, root_index=0):
    """Lift q_1..q_{r-1} to q~_0..q~_{r-1} with q_i = q~_i / q~_{i-1} and product 1.

    The r solutions differ by r-th roots of unity; ``root_index`` picks one,
    counting counterclockwise from the principal root.
    """
    if not isinstance(s, ScalarChain):
        s = ScalarChain(tuple(s))
    r = len(s.q) + 1
    if not 0 <= root_index < r:
        raise InvalidRootIndex(f"root_index must be in [0, {r}), got {root_index}")
    partial = [1.0 + 0j]
    for x in s.q:
        partial.append(partial[-1] * x)
    c = 1.0 / np.prod(partial)
    q0 = c ** (1.0 / r) * np.exp(2j * np.pi * root_index / r)
    lifted = tuple(complex(q0 * p) for p in partial)
    implied_det = np.prod([x ** k for k, x in enumerate(s.q, start=1)])
    top = lifted[-1] ** r
    if abs(top - implied_det) > 1e-10 * max(1.0, abs(implied_det)):
        raise InvalidRootIndex(f"q~_(r-1)^r = {top} does not match det Y = {implied_det}")
    return ScalarChain(s.q, lifted)


def standard_form_residual(q):
    """Worst relative distance of the betas from (0 | I)."""
    return max(
        (fro(b - standard_beta(i)) / max(1.0, fro(b)) for i, b in enumerate(q.betas, start=1)),
        default=0.0,
    )


def borel_of(q, tol=1e-8):
    """Y of a standard-form quiver as a B_1 element.

    Roundoff below the diagonal (relative size at most ``tol``) is dropped.
    """
    y = endo_Y(q)
    if fro(np.tril(y, -1)) > tol * max(1.0, fro(y)):
        raise InvalidBorel("Y is not upper triangular; is the quiver in standard form?")
    return BorelElement(np.triu(y), "B1", tol=tol)
