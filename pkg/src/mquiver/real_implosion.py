"""Compact (real) implosion strata inside the space of toric quivers.

Alcove points theta_1 >= ... >= theta_n >= theta_1 - 2 pi with zero sum map to
diagonal elements of B_1; their unit-circle scalar chains give toric quivers
with nu = mu = sqrt(q_j ... q_k - 1) on the branch cut along the positive real
axis. Equal entries of Y = diag(w) describe the stratum and predict its
stabilizer in SU(n).
"""
from dataclasses import dataclass

import numpy as np

from . import cxmat
from .cxmat import fro
from .errors import InvalidAlcovePoint, NotUnitModulus
from .normal_form import BorelElement
from .quiver import Quiver, ScalarChain, toric_products, toric_quiver

TWO_PI = 2 * np.pi
SNAP_TOL = 1e-12
RUN_TOL = 1e-8


@dataclass(frozen=True)
class AlcovePoint:
    thetas: tuple
    tol: float = 1e-12

    def __post_init__(self):
        th = tuple(float(t) for t in self.thetas)
        if not th:
            raise InvalidAlcovePoint("empty alcove point")
        if abs(sum(th)) > self.tol * max(1.0, len(th)):
            raise InvalidAlcovePoint(f"angles sum to {sum(th)}, not 0")
        if any(a < b - self.tol for a, b in zip(th, th[1:])):
            raise InvalidAlcovePoint("angles must be non-increasing")
        if th[-1] < th[0] - TWO_PI - self.tol:
            raise InvalidAlcovePoint("theta_n < theta_1 - 2 pi")
        object.__setattr__(self, "thetas", th)

    @property
    def n(self):
        return len(self.thetas)


def _unit(angle, tol=SNAP_TOL):
    """exp(i angle), exactly 1 when the angle is a multiple of 2 pi within ``tol``."""
    k = round(angle / TWO_PI)
    if abs(angle - k * TWO_PI) <= tol:
        return 1.0 + 0j
    return complex(np.exp(1j * angle))


def _same_angle(a, b, tol):
    d = a - b
    return abs(d - round(d / TWO_PI) * TWO_PI) <= tol


def alcove_to_b1(p):
    """diag(exp(i(theta_k - theta_1))) in B_1."""
    w = [_unit(t - p.thetas[0]) for t in p.thetas]
    return BorelElement(np.diag(w), "B1")


def qs_from_alcove(p):
    """Unit-circle chain with q_{n-k} = w_{k+1} / w_k."""
    n = p.n
    q = [0j] * (n - 1)
    for k in range(1, n):
        q[n - k - 1] = _unit(p.thetas[k] - p.thetas[k - 1])
    return ScalarChain(tuple(q))


def branch_sqrt(z):
    """Square root with argument of z taken in [0, 2 pi)."""
    z = complex(z)
    if z == 0:
        return 0j
    arg = np.angle(z)
    if arg < 0:
        arg += TWO_PI
    return complex(np.sqrt(abs(z)) * np.exp(0.5j * arg))


def hjs_toric_quiver(s, zero_tol=SNAP_TOL):
    """Toric quiver with nu = mu = branch_sqrt(q_j ... q_k - 1) for a unit-circle chain."""
    if not isinstance(s, ScalarChain):
        s = ScalarChain(tuple(s))
    if any(abs(abs(x) - 1) > 1e-9 for x in s.q):
        raise NotUnitModulus("real implosion quivers need |q_i| = 1")
    products = [[0j if abs(p) <= zero_tol else p for p in row] for row in toric_products(s)]
    roots = [[branch_sqrt(p) for p in row] for row in products]
    return toric_quiver(products, roots, roots)


@dataclass(frozen=True)
class StratumDescriptor:
    """Equal-entry classes of the Y diagonal (1-based, standard order) and derived data."""

    runs: tuple
    collapsed_dims: tuple
    stabilizer_blocks: tuple

    @property
    def predicted_dim(self):
        return sum(b * b - 1 for b in self.stabilizer_blocks)

    @property
    def is_vertex(self):
        return len(self.runs) == 1

    @property
    def is_interior(self):
        return all(len(run) == 1 for run in self.runs)


def stratum_of(p, tol=RUN_TOL):
    """Classes of equal Y-diagonal entries, collapsed flag, and stabilizer block sizes.

    On the alcove every class is an interval in cyclic order; the class joining
    index n to index 1 occurs only on the wall theta_n = theta_1 - 2 pi.
    The collapsed flag drops every node k with q_k = 1.
    """
    n = p.n
    th = p.thetas
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _same_angle(th[i], th[j], tol):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i + 1)
    runs = tuple(sorted(tuple(g) for g in groups.values()))
    # q_{n-k} = 1 exactly when w_k = w_{k+1}
    q_is_one = {n - k: _same_angle(th[k], th[k - 1], tol) for k in range(1, n)}
    collapsed = tuple(k for k in range(1, n) if not q_is_one[k]) + (n,)
    return StratumDescriptor(runs, collapsed, tuple(len(r) for r in runs))


def _su_basis(n):
    """Orthonormal real basis of su(n) as complex matrices."""
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j], m[j, i] = 1, -1
            basis.append(m / np.sqrt(2))
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j], m[j, i] = 1j, 1j
            basis.append(m / np.sqrt(2))
    if n > 1:
        ones = np.ones((1, n))
        _, diag = cxmat.rank_kernel(ones, 0.5)
        for col in diag.T:
            basis.append(np.diag(1j * col.real))
    return basis


def _sl_basis(k):
    """Orthonormal complex basis of sl(k)."""
    if k < 2:
        return []
    vec_id = np.eye(k).reshape(-1, order="F")[None, :]
    _, ker = cxmat.rank_kernel(vec_id, 0.5)
    return [col.reshape(k, k, order="F") for col in ker.T]


def _variation(q, etas):
    """Linearized action of (eta_1..eta_n) on all maps, as one real vector."""
    parts = []
    for k in range(1, q.r):
        a, b = q.alphas[k - 1], q.betas[k - 1]
        lo, hi = etas[k - 1], etas[k]
        parts.append(hi @ a - a @ lo)
        parts.append(lo @ b - b @ hi)
    flat = np.concatenate([m.ravel() for m in parts]) if parts else np.zeros(0, dtype=np.complex128)
    return np.concatenate([flat.real, flat.imag])


def measured_stabilizer_dim(q, tol=1e-9):
    """Dimension of the xi in su(n) for which some eta in Lie(H_C) makes (xi, eta) fix the quiver."""
    n = q.n
    zeros = [np.zeros((d, d), dtype=np.complex128) for d in q.dims]
    columns = []
    su = _su_basis(n)
    for xi in su:
        etas = list(zeros)
        etas[-1] = xi
        columns.append(_variation(q, etas))
    for node in range(2, q.r):
        for s in _sl_basis(q.dims[node - 1]):
            for coeff in (1.0, 1j):
                etas = list(zeros)
                etas[node - 1] = coeff * s
                columns.append(_variation(q, etas))
    mat = np.column_stack(columns)
    if mat.size == 0 or not np.any(mat):
        return len(su)
    _, kernel = cxmat.rank_kernel(mat, tol)
    if kernel.shape[1] == 0:
        return 0
    return cxmat.rank(kernel[: len(su)].real, 1e-8)


def _forward_elements(n, runs):
    """Embedded su(block) generators, in toric coordinates, for every run of size >= 2."""
    out = []
    for run in runs:
        if len(run) < 2:
            continue
        coords = sorted(n - k for k in run)  # toric position of standard index k, 0-based
        for small in _su_basis(len(run)):
            xi = np.zeros((n, n), dtype=np.complex128)
            xi[np.ix_(coords, coords)] = small
            out.append((xi, coords))
    return out


def forward_residual(q, runs):
    """Largest variation of the quiver under the predicted stabilizer generators.

    At node k the compensating eta is the same block when the run fits inside
    C^k and zero otherwise.
    """
    worst = 0.0
    scale = q.scale()
    for xi, coords in _forward_elements(q.n, runs):
        etas = []
        for d in q.dims:
            if max(coords) < d:
                etas.append(xi[:d, :d])
            else:
                etas.append(np.zeros((d, d), dtype=np.complex128))
        etas[-1] = xi
        worst = max(worst, float(np.linalg.norm(_variation(q, etas))) / scale)
    return worst


def _span(m, tol):
    """Orthonormal basis of the column space."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    return u[:, : int(np.count_nonzero(s > tol * s[0]))]


def quiver_decomposition(q, tol=1e-9):
    """Split each internal node j as ker(alpha_j) + im(beta_j).

    Returns ``(ok, complement_dims)``. ``ok`` requires, at every internal
    node, a direct sum, beta_{j-1} vanishing on ker(alpha_j), im(alpha_{j-1})
    inside im(beta_j), and beta_j mapping the next complement onto this one.
    """
    n = q.n
    comps = []
    ok = True
    for j in range(1, q.r):
        a, b = q.alphas[j - 1], q.betas[j - 1]
        _, zero_part = cxmat.rank_kernel(a, tol)
        comp = _span(b, tol)
        comps.append(comp)
        d = q.dims[j - 1]
        if zero_part.shape[1] + comp.shape[1] != d or cxmat.rank(np.column_stack([zero_part, comp]), tol) != d:
            ok = False
        if j >= 2:
            scale = max(1.0, fro(q.betas[j - 2]))
            if zero_part.shape[1] and fro(q.betas[j - 2] @ zero_part) > tol * scale:
                ok = False
            prev_a = q.alphas[j - 2]
            if fro(prev_a - cxmat.projector(comp) @ prev_a) > tol * max(1.0, fro(prev_a)):
                ok = False
    comps.append(cxmat.identity(n))
    for j in range(1, q.r):
        image = q.betas[j - 1] @ comps[j]
        if cxmat.rank(image, tol) != comps[j - 1].shape[1]:
            ok = False
    return ok, tuple(c.shape[1] for c in comps)


@dataclass(frozen=True)
class StabilizerCheck:
    stratum: StratumDescriptor
    predicted_dim: int
    measured_dim: int
    forward_residual: float
    decomposition_ok: bool
    complement_dims: tuple

    @property
    def agrees(self):
        return self.predicted_dim == self.measured_dim


def stabilizer_check(p, tol=1e-9):
    """Compare the predicted SU(n) stabilizer of the stratum with a direct linear computation."""
    stratum = stratum_of(p)
    q = hjs_toric_quiver(qs_from_alcove(p))
    ok, comps = quiver_decomposition(q, tol)
    return StabilizerCheck(
        stratum=stratum,
        predicted_dim=stratum.predicted_dim,
        measured_dim=measured_stabilizer_dim(q, tol),
        forward_residual=forward_residual(q, stratum.runs),
        decomposition_ok=ok,
        complement_dims=comps,
    )


def alcove_grid(n, divisions=24):
    """All alcove points whose angles are multiples of 2 pi / divisions."""
    step = TWO_PI / divisions
    points = []

    def rec(prefix, remaining_slots):
        if remaining_slots == 0:
            if sum(prefix) == 0 and prefix[0] - prefix[-1] <= divisions:
                points.append(AlcovePoint(tuple(k * step for k in prefix)))
            return
        hi = prefix[-1]
        lo = prefix[0] - divisions
        total = sum(prefix)
        for k in range(hi, lo - 1, -1):
            rest = remaining_slots - 1
            if total + k + rest * k < 0:
                break
            if total + k + rest * lo > 0:
                continue
            rec(prefix + [k], rest)

    for k1 in range(0, divisions + 1):
        rec([k1], n - 1)
    return points


def is_vertex(p, tol=RUN_TOL):
    return stratum_of(p, tol).is_vertex
