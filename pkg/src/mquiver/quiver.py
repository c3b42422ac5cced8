"""Flag quivers and the multiplicative moment-map equations.

A quiver with dimension vector ``dims = (n_1 < ... < n_r)`` carries maps
``alpha_i: C^{n_i} -> C^{n_{i+1}}`` and ``beta_i: C^{n_{i+1}} -> C^{n_i}``.
In code ``alphas[k]`` is ``alpha_{k+1}`` (shape ``n_{k+2} x n_{k+1}``).

The equations at node ``m = 1..r-1`` read

    1 + beta_m alpha_m = q_m (1 + alpha_{m-1} beta_{m-1})

with ``alpha_0 beta_0 = 0`` on the bottom node.
"""
from dataclasses import InitVar, dataclass, field

import numpy as np

from . import cxmat
from .cxmat import DEFAULT_TOL, CLUSTER_TOL, fro
from .errors import (
    ChainLengthMismatch,
    InvalidGauge,
    InvalidQuiver,
    InvalidScalars,
    NotASolution,
    SingularMatrix,
)


def validate_dims(dims):
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise InvalidQuiver("dims must be non-empty")
    if any(d <= 0 for d in dims):
        raise InvalidQuiver("dims must be positive")
    if any(a >= b for a, b in zip(dims, dims[1:])):
        raise InvalidQuiver("dims not strictly increasing")
    return dims


def is_full_flag(dims):
    return tuple(dims) == tuple(range(1, len(dims) + 1))


def full_flag(n):
    return tuple(range(1, n + 1))


def _as_dims(dims):
    if isinstance(dims, (int, np.integer)):
        return full_flag(int(dims))
    return validate_dims(dims)


@dataclass(frozen=True, eq=False)
class Quiver:
    """Dimension vector plus the alpha/beta chains.

    Construction checks shapes and, unless ``check=False``, membership in
    M_mult: every ``1 + alpha_i beta_i`` and ``1 + beta_i alpha_i`` must pass
    the invertibility guard of :func:`mquiver.cxmat.inverse`.
    """

    dims: tuple
    alphas: tuple
    betas: tuple
    check: InitVar[bool] = True

    def __post_init__(self, check):
        dims = validate_dims(self.dims)
        r = len(dims)
        alphas = tuple(cxmat.frozen(a) for a in self.alphas)
        betas = tuple(cxmat.frozen(b) for b in self.betas)
        if len(alphas) != r - 1 or len(betas) != r - 1:
            raise InvalidQuiver(f"expected {r - 1} alpha and beta maps for dims {dims}")
        for k in range(r - 1):
            lo, hi = dims[k], dims[k + 1]
            if alphas[k].shape != (hi, lo):
                raise InvalidQuiver(f"alpha_{k + 1} has shape {alphas[k].shape}, expected {(hi, lo)}")
            if betas[k].shape != (lo, hi):
                raise InvalidQuiver(f"beta_{k + 1} has shape {betas[k].shape}, expected {(lo, hi)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        if check:
            bad = self.invertibility_failure()
            if bad is not None:
                raise InvalidQuiver(bad)

    @classmethod
    def zero(cls, dims):
        dims = _as_dims(dims)
        alphas = [np.zeros((b, a), dtype=np.complex128) for a, b in zip(dims, dims[1:])]
        betas = [np.zeros((a, b), dtype=np.complex128) for a, b in zip(dims, dims[1:])]
        return cls(dims, tuple(alphas), tuple(betas))

    @property
    def r(self):
        return len(self.dims)

    @property
    def n(self):
        return self.dims[-1]

    @property
    def is_full_flag(self):
        return is_full_flag(self.dims)

    def alpha(self, i):
        """alpha_i, 1-based."""
        return self.alphas[i - 1]

    def beta(self, i):
        return self.betas[i - 1]

    def endo(self, node):
        """1 + alpha_{node-1} beta_{node-1} on C^{n_node} (identity on node 1)."""
        d = self.dims[node - 1]
        if node == 1:
            return cxmat.identity(d)
        return cxmat.identity(d) + self.alphas[node - 2] @ self.betas[node - 2]

    def co_endo(self, node):
        """1 + beta_node alpha_node on C^{n_node}, for node < r."""
        return cxmat.identity(self.dims[node - 1]) + self.betas[node - 1] @ self.alphas[node - 1]

    def invertibility_failure(self, tol=DEFAULT_TOL):
        """Name the first non-invertible endomorphism, or None inside M_mult."""
        for i in range(1, self.r):
            ab = cxmat.identity(self.dims[i]) + self.alphas[i - 1] @ self.betas[i - 1]
            ba = self.co_endo(i)
            if not cxmat.is_invertible(ab, tol):
                return f"1 + alpha_{i} beta_{i} is not invertible"
            if not cxmat.is_invertible(ba, tol):
                return f"1 + beta_{i} alpha_{i} is not invertible"
        return None

    def in_m_mult(self, tol=DEFAULT_TOL):
        return self.invertibility_failure(tol) is None

    def scale(self):
        return max([1.0] + [fro(a) for a in self.alphas] + [fro(b) for b in self.betas])

    def __eq__(self, other):
        if not isinstance(other, Quiver):
            return NotImplemented
        return (
            self.dims == other.dims
            and all(np.array_equal(a, b) for a, b in zip(self.alphas, other.alphas))
            and all(np.array_equal(a, b) for a, b in zip(self.betas, other.betas))
        )

    __hash__ = None

    def distance(self, other):
        """Largest relative Frobenius difference over all maps."""
        if self.dims != other.dims:
            return np.inf
        s = max(self.scale(), other.scale())
        diffs = [fro(a - b) for a, b in zip(self.alphas, other.alphas)]
        diffs += [fro(a - b) for a, b in zip(self.betas, other.betas)]
        return max(diffs, default=0.0) / s


@dataclass(frozen=True)
class ScalarChain:
    """q_1..q_{r-1}, optionally with the lifted chain q~_0..q~_{r-1}."""

    q: tuple
    lifted: tuple = None
    tol: float = field(default=1e-9, repr=False, compare=False)

    def __post_init__(self):
        q = tuple(complex(x) for x in self.q)
        if any(x == 0 for x in q):
            raise InvalidScalars("scalars q_i must be nonzero")
        object.__setattr__(self, "q", q)
        if self.lifted is not None:
            lifted = tuple(complex(x) for x in self.lifted)
            if len(lifted) != len(q) + 1:
                raise InvalidScalars(f"lifted chain must have length {len(q) + 1}")
            if any(x == 0 for x in lifted):
                raise InvalidScalars("lifted scalars must be nonzero")
            if abs(np.prod(lifted) - 1) > self.tol:
                raise InvalidScalars("lifted scalars must multiply to 1")
            for i, qi in enumerate(q):
                if abs(lifted[i + 1] / lifted[i] - qi) > self.tol * max(1.0, abs(qi)):
                    raise InvalidScalars(f"q_{i + 1} != q~_{i + 1} / q~_{i}")
            object.__setattr__(self, "lifted", lifted)

    def __len__(self):
        return len(self.q)

    def __getitem__(self, i):
        """q_i, 1-based."""
        if i < 1:
            raise IndexError(i)
        return self.q[i - 1]

    def top_products(self):
        """(q_{r-1}, q_{r-1} q_{r-2}, ..., q_{r-1}...q_1)."""
        out, acc = [], 1.0 + 0j
        for x in reversed(self.q):
            acc *= x
            out.append(acc)
        return out

    def borel_diagonal(self):
        """Diagonal of the standard-form Y: (1, q_{r-1}, ..., q_{r-1}...q_1)."""
        return np.array([1.0 + 0j] + self.top_products())


@dataclass(frozen=True, eq=False)
class GaugeElement:
    """Factors g_1..g_r acting at the nodes; ``special[i]`` requests det g_i = 1."""

    factors: tuple
    special: tuple = None
    tol: float = field(default=1e-9, repr=False)

    def __post_init__(self):
        factors = tuple(cxmat.frozen(g) for g in self.factors)
        special = self.special
        if special is None:
            special = (True,) * len(factors)
        special = tuple(bool(s) for s in special)
        if len(special) != len(factors):
            raise InvalidGauge("one special-linear flag per factor")
        for i, (g, s) in enumerate(zip(factors, special), start=1):
            if g.shape[0] != g.shape[1]:
                raise InvalidGauge(f"g_{i} is not square")
            if not cxmat.is_invertible(g):
                raise InvalidGauge(f"g_{i} is not invertible")
            if s and abs(np.linalg.det(g) - 1) > self.tol * cxmat.cond(g):
                raise InvalidGauge(f"det g_{i} != 1")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "special", special)

    @classmethod
    def identity(cls, dims):
        return cls(tuple(cxmat.identity(d) for d in _as_dims(dims)))

    @classmethod
    def random(cls, dims, rng, cond_max=10.0):
        """Random special-linear factor at every node."""
        return cls(tuple(cxmat.random_special_linear(d, rng, cond_max) for d in _as_dims(dims)))

    @property
    def dims(self):
        return tuple(g.shape[0] for g in self.factors)

    def inverse(self):
        return GaugeElement(tuple(cxmat.inverse(g)[0] for g in self.factors), self.special, self.tol)

    def compose(self, other):
        """self . other (apply ``other`` first)."""
        return GaugeElement(
            tuple(a @ b for a, b in zip(self.factors, other.factors)),
            tuple(x and y for x, y in zip(self.special, other.special)),
            self.tol,
        )


def act_gauge(q, g=None, left=None, tol=DEFAULT_TOL):
    """alpha_i -> g_{i+1} alpha_i g_i^-1, beta_i -> g_i beta_i g_{i+1}^-1.

    ``left`` multiplies the top-node factor on the left, so it acts as
    alpha_{r-1} -> L alpha_{r-1}, beta_{r-1} -> beta_{r-1} L^-1.
    """
    if g is None:
        factors = [cxmat.identity(d) for d in q.dims]
    else:
        if g.dims != q.dims:
            raise InvalidGauge(f"gauge dims {g.dims} do not match quiver dims {q.dims}")
        factors = list(g.factors)
    if left is not None:
        left = cxmat.as_cmatrix(left, "left")
        if left.shape != (q.n, q.n):
            raise InvalidGauge(f"left factor must be {q.n}x{q.n}")
        factors[-1] = left @ factors[-1]
    inverses = [cxmat.inverse(f, tol)[0] for f in factors]
    alphas = [factors[k + 1] @ a @ inverses[k] for k, a in enumerate(q.alphas)]
    betas = [factors[k] @ b @ inverses[k + 1] for k, b in enumerate(q.betas)]
    return Quiver(q.dims, tuple(alphas), tuple(betas), check=False)


def _check_chain(q, s):
    if len(s.q) != q.r - 1:
        raise ChainLengthMismatch(f"quiver with r={q.r} needs {q.r - 1} scalars, got {len(s.q)}")


def residuals(q, s):
    """R_m = (1 + beta_m alpha_m) - q_m (1 + alpha_{m-1} beta_{m-1}) for m = 1..r-1."""
    _check_chain(q, s)
    return [q.co_endo(m) - s[m] * q.endo(m) for m in range(1, q.r)]


def equation_residual(q, s):
    """Worst relative Frobenius residual of the equations (0 when r = 1)."""
    _check_chain(q, s)
    worst = 0.0
    for m in range(1, q.r):
        f, e = q.co_endo(m), q.endo(m)
        scale = max(1.0, fro(f), abs(s[m]) * fro(e))
        worst = max(worst, fro(f - s[m] * e) / scale)
    return worst


def infer_scalars(q, tol=DEFAULT_TOL):
    """Recover q_m = tr((1 + beta_m alpha_m)(1 + alpha_{m-1} beta_{m-1})^-1) / n_m.

    Raises NotASolution unless the full-matrix residuals are within ``tol``.
    """
    qs = []
    for m in range(1, q.r):
        inv, _ = cxmat.inverse(q.endo(m), tol)
        qs.append(np.trace(q.co_endo(m) @ inv) / q.dims[m - 1])
    try:
        s = ScalarChain(tuple(qs))
    except InvalidScalars as exc:
        raise NotASolution(f"inferred scalars invalid: {exc}") from exc
    res = equation_residual(q, s)
    if res > tol:
        raise NotASolution(f"equation residual {res:.3e} exceeds {tol:g}", residual=res)
    return s


def vdb_moment_map(alpha, beta, tol=DEFAULT_TOL):
    """Group-valued moment map (1 + beta alpha, (1 + alpha beta)^-1) of a length-one quiver."""
    alpha = cxmat.as_cmatrix(alpha, "alpha")
    beta = cxmat.as_cmatrix(beta, "beta")
    if alpha.shape != beta.shape[::-1]:
        raise ValueError("alpha and beta shapes are not transposes of each other")
    w, v = alpha.shape
    ba = cxmat.identity(v) + beta @ alpha
    ab = cxmat.identity(w) + alpha @ beta
    cxmat.inverse(ba, tol)
    return ba, cxmat.inverse(ab, tol)[0]


def endo_Y(q):
    """Y = 1 + alpha_{r-1} beta_{r-1}."""
    return q.endo(q.r)


def additive_residuals(q, lambdas=None):
    """Scalars and worst relative off-scalar residual of beta alpha - alpha beta.

    With ``lambdas=None`` each lambda_m is inferred as a normalized trace;
    otherwise the supplied values (e.g. zeros) are tested.
    """
    inferred, worst = [], 0.0
    for m in range(1, q.r):
        ba = q.betas[m - 1] @ q.alphas[m - 1]
        ab = q.alphas[m - 2] @ q.betas[m - 2] if m > 1 else np.zeros_like(ba)
        d = ba - ab
        lam = np.trace(d) / q.dims[m - 1] if lambdas is None else complex(lambdas[m - 1])
        inferred.append(complex(lam))
        scale = max(1.0, fro(ba), fro(ab))
        worst = max(worst, fro(d - lam * cxmat.identity(q.dims[m - 1])) / scale)
    return tuple(inferred), worst


@dataclass(frozen=True)
class StabilityReport:
    alpha_injective: tuple
    beta_surjective: tuple
    free: bool
    stable_h: bool
    stable_full: bool


def stability_report(q, tol=DEFAULT_TOL):
    """Injectivity of each alpha_i and surjectivity of each beta_i, with the derived flags."""
    inj = tuple(cxmat.rank(a, tol) == a.shape[1] for a in q.alphas)
    surj = tuple(cxmat.rank(b, tol) == b.shape[0] for b in q.betas)
    return StabilityReport(
        alpha_injective=inj,
        beta_surjective=surj,
        free=all(a or b for a, b in zip(inj, surj)),
        stable_h=all(inj) or all(surj),
        stable_full=all(a and b for a, b in zip(inj, surj)),
    )


def minpoly_roots(s):
    return [1.0 + 0j] + s.top_products()


def minpoly_residual(q, s):
    """||(Y-1)(Y-q_{r-1})...(Y-q_{r-1}...q_1)||_F over the product of factor norms."""
    _check_chain(q, s)
    prod, norm_prod = cxmat.linear_factor_product(endo_Y(q), minpoly_roots(s))
    if norm_prod == 0.0:
        return 0.0
    return fro(prod) / norm_prod


def xk_chain(q):
    """X_k = alpha_{r-1}...alpha_{r-k} beta_{r-k}...beta_{r-1} for k = 1..r-1.

    Returns the list of X_k and the matching products of map norms.
    """
    r = q.r
    out, norms = [], []
    if r == 1:
        return out, norms
    a_chain = q.alphas[r - 2]
    b_chain = q.betas[r - 2]
    norm = fro(a_chain) * fro(b_chain)
    out.append(a_chain @ b_chain)
    norms.append(norm)
    for k in range(2, r):
        a_chain = a_chain @ q.alphas[r - k - 1]
        b_chain = q.betas[r - k - 1] @ b_chain
        norm *= fro(q.alphas[r - k - 1]) * fro(q.betas[r - k - 1])
        out.append(a_chain @ b_chain)
        norms.append(norm)
    return out, norms


def xk_recursion_residual(q, s):
    """Worst relative residual of X_k X = (Q_k - 1) X_k + Q_k X_{k+1}, Q_k = q_{r-1}...q_{r-k}."""
    _check_chain(q, s)
    xs, norms = xk_chain(q)
    if not xs:
        return 0.0
    x = xs[0]
    nx = fro(x)
    qk = s.top_products()
    worst = 0.0
    zero = np.zeros_like(x)
    for k in range(1, q.r):
        xk = xs[k - 1]
        xk1 = xs[k] if k < len(xs) else zero
        lhs = xk @ x
        rhs = (qk[k - 1] - 1) * xk + qk[k - 1] * xk1
        scale = max(
            fro(xk) * nx,
            abs(qk[k - 1] - 1) * fro(xk),
            abs(qk[k - 1]) * fro(xk1),
            norms[k - 1] * nx,
        )
        if scale == 0.0:
            continue
        worst = max(worst, fro(lhs - rhs) / scale)
    return worst


@dataclass(frozen=True)
class EigenspaceDecomposition:
    """Generalized-eigenspace subquiver for one top-node parameter tau.

    ``node_params[m-1]`` is the parameter at node m and ``bases[m-1]`` an
    orthonormal basis of the generalized eigenspace of 1 + alpha_{m-1} beta_{m-1}
    there. ``iso_margins[m-1]`` is the smaller of sigma_min / sigma_max for the
    restricted alpha_m and beta_m, or None when the level's upper parameter is 1.
    """

    tau: complex
    node_params: tuple
    bases: tuple
    leakage: float
    kernel_agreement: float
    iso_margins: tuple
    equation_residual: float

    @property
    def dims(self):
        return tuple(b.shape[1] for b in self.bases)

    def isomorphisms_ok(self, margin=1e-6):
        return all(m is None or m > margin for m in self.iso_margins)


def _restricted_margin(mat, dom, cod):
    if dom.shape[1] != cod.shape[1]:
        return 0.0
    if dom.shape[1] == 0:
        return 1.0
    sv = np.linalg.svd(cod.conj().T @ mat @ dom, compute_uv=False)
    return 0.0 if sv[0] == 0.0 else float(sv[-1] / sv[0])


def eigenspace_decompose(q, s, tau, tol=DEFAULT_TOL, cluster_tol=CLUSTER_TOL):
    """Split the quiver along generalized eigenspaces of the node endomorphisms.

    Node m uses parameter tau / (q_m q_{m+1} ... q_{r-1}). Besides the bases,
    the result records how far alpha and beta leak out of the designated spaces,
    whether each space agrees with the matching eigenspace of 1 + beta_m alpha_m,
    and how well-conditioned the restricted maps are.
    """
    _check_chain(q, s)
    res = equation_residual(q, s)
    if res > tol:
        raise NotASolution(f"equation residual {res:.3e} exceeds {tol:g}", residual=res)
    tau = complex(tau)
    r = q.r
    params = [0j] * r
    params[r - 1] = tau
    for m in range(r - 1, 0, -1):
        params[m - 1] = params[m] / s[m]
    bases = [cxmat.generalized_eigenspace(q.endo(m), params[m - 1], cluster_tol) for m in range(1, r + 1)]

    leakage = 0.0
    agreement = 0.0
    margins = []
    for m in range(1, r):
        a, b = q.alphas[m - 1], q.betas[m - 1]
        lo, hi = bases[m - 1], bases[m]
        p_lo, p_hi = cxmat.projector(lo), cxmat.projector(hi)
        if fro(a) > 0 and lo.shape[1]:
            leakage = max(leakage, fro(a @ lo - p_hi @ (a @ lo)) / fro(a))
        if fro(b) > 0 and hi.shape[1]:
            leakage = max(leakage, fro(b @ hi - p_lo @ (b @ hi)) / fro(b))
        other = cxmat.generalized_eigenspace(q.co_endo(m), params[m], cluster_tol)
        agreement = max(agreement, cxmat.subspace_distance(lo, other))
        if abs(params[m] - 1) <= cluster_tol * max(1.0, abs(params[m])):
            margins.append(None)
        else:
            margins.append(min(_restricted_margin(a, lo, hi), _restricted_margin(b, hi, lo)))
    margins.append(None)
    return EigenspaceDecomposition(
        tau=tau,
        node_params=tuple(params),
        bases=tuple(bases),
        leakage=leakage,
        kernel_agreement=agreement,
        iso_margins=tuple(margins),
        equation_residual=res,
    )


def toric_products(q):
    """p[k][j-1] = q_j q_{j+1} ... q_k - 1 for 1 <= j <= k <= r-1."""
    qs = list(q.q if isinstance(q, ScalarChain) else q)
    out = []
    for k in range(1, len(qs) + 1):
        row = [0j] * k
        acc = 1.0 + 0j
        for j in range(k, 0, -1):
            acc *= qs[j - 1]
            row[j - 1] = acc - 1
        out.append(row)
    return out


def toric_quiver(products, nus, mus):
    """Assemble the toric alpha_k, beta_k from per-level diagonal entries."""
    n = len(products) + 1
    alphas, betas = [], []
    for k in range(1, n):
        a = np.zeros((k + 1, k), dtype=np.complex128)
        b = np.zeros((k, k + 1), dtype=np.complex128)
        for j in range(k):
            a[j, j] = nus[k - 1][j]
            b[j, j] = mus[k - 1][j]
        alphas.append(a)
        betas.append(b)
    return Quiver(full_flag(n), tuple(alphas), tuple(betas))


def gen_toric(dims, s, magnitudes=None):
    """Toric full-flag quiver solving the equations for the chain ``s``.

    The diagonal entries satisfy mu_j^k nu_j^k = q_j ... q_k - 1. By default
    nu = mu = principal square root; ``magnitudes[k-1][j-1]`` overrides nu_j^k
    and mu is then chosen to match.
    """
    dims = _as_dims(dims)
    if not is_full_flag(dims):
        raise InvalidQuiver("toric quivers need a full-flag dimension vector")
    if not isinstance(s, ScalarChain):
        s = ScalarChain(tuple(s))
    _check_chain(Quiver.zero(dims), s)
    products = toric_products(s)
    nus, mus = [], []
    for k, row in enumerate(products, start=1):
        if magnitudes is None:
            nu = [complex(np.sqrt(p)) for p in row]
            mu = list(nu)
        else:
            nu = [complex(x) for x in magnitudes[k - 1]]
            if len(nu) != k:
                raise InvalidScalars(f"magnitudes for level {k} must have {k} entries")
            mu = []
            for p, x in zip(row, nu):
                if x == 0:
                    if p != 0:
                        raise InvalidScalars(f"nu = 0 cannot solve mu nu = {p} at level {k}")
                    mu.append(0j)
                else:
                    mu.append(p / x)
        nus.append(nu)
        mus.append(mu)
    try:
        return toric_quiver(products, nus, mus)
    except InvalidQuiver as exc:
        raise InvalidScalars(str(exc)) from exc


def gen_random(dims, seed, bound=10.0, diagonal=None):
    """Random standard-form solution, deterministic per ``seed``.

    Draws Y in B_1 (upper triangular, leading entry 1) with off-diagonal
    entries of modulus at most ``bound`` and diagonal moduli in [1/2, 2],
    then rebuilds the quiver from Y, returning ``(quiver, chain)``. ``diagonal`` fixes the diagonal of Y
    (it must start with 1), e.g. all ones for a q = 1 solution.
    """
    from .normal_form import BorelElement, reconstruct_from_borel

    dims = _as_dims(dims)
    if not is_full_flag(dims):
        raise InvalidQuiver("gen_random needs a full-flag dimension vector")
    n = dims[-1]
    rng = np.random.default_rng(seed)
    y = np.triu(cxmat.random_complex((n, n), rng, bound), k=1)
    if diagonal is None:
        diag = rng.uniform(0.5, 2.0, size=n) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=n))
        diag[0] = 1.0
    else:
        diag = np.asarray(diagonal, dtype=np.complex128)
    y[np.diag_indices(n)] = diag
    return reconstruct_from_borel(BorelElement(y, "B1"))
