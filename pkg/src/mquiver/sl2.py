"""Worked SL(2, C) case: N-invariants on SL(2, C) x B and the quiver domain.

A point is u = [[a, b], [c, d]] in SL(2, C) together with v = [[e, f], [0, e']]
in the Borel B.
"""
from dataclasses import dataclass

import numpy as np

from . import steinberg
from .errors import InvalidPoint, NotUnitary, ZeroE

RELATION_TOL = 1e-10


@dataclass(frozen=True)
class SL2Point:
    a: complex
    b: complex
    c: complex
    d: complex
    e: complex
    f: complex
    eprime: complex

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "e", "f", "eprime"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        scale = max(1.0, abs(self.a * self.d), abs(self.b * self.c))
        if abs(self.a * self.d - self.b * self.c - 1) > RELATION_TOL * scale:
            raise InvalidPoint("ad - bc != 1")
        if abs(self.e * self.eprime - 1) > RELATION_TOL * max(1.0, abs(self.e * self.eprime)):
            raise InvalidPoint("e e' != 1")

    @classmethod
    def from_matrices(cls, u, v):
        u = np.asarray(u, dtype=np.complex128)
        v = np.asarray(v, dtype=np.complex128)
        if v[1, 0] != 0:
            raise InvalidPoint("v must be upper triangular")
        return cls(u[0, 0], u[0, 1], u[1, 0], u[1, 1], v[0, 0], v[0, 1], v[1, 1])

    @classmethod
    def random(cls, rng, bound=3.0):
        """Random point; entries are drawn then ad - bc and e e' fixed by solving for d and e'."""
        while True:
            a, b, c = (complex(*rng.uniform(-bound, bound, 2)) for _ in range(3))
            if abs(a) > 0.1:
                break
        d = (1 + b * c) / a
        e = complex(*rng.uniform(-bound, bound, 2))
        while abs(e) < 0.1:
            e = complex(*rng.uniform(-bound, bound, 2))
        f = complex(*rng.uniform(-bound, bound, 2))
        return cls(a, b, c, d, e, f, 1 / e)

    def u(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    def v(self):
        return np.array([[self.e, self.f], [0, self.eprime]], dtype=np.complex128)

    def to_double(self):
        return steinberg.DoublePoint(self.u(), self.v(), borel=True)


def sl2_n_action(p, t):
    """Act by [[1, t], [0, 1]]; implemented through the general right N-action."""
    moved = steinberg.n_action(p.to_double(), np.array([[1, t], [0, 1]], dtype=np.complex128))
    return SL2Point.from_matrices(moved.u, moved.v)


def sl2_invariants(p):
    """(a, c, e, e', x, y) with x = af + (e' - e)b and y = cf + (e' - e)d."""
    x = p.a * p.f + (p.eprime - p.e) * p.b
    y = p.c * p.f + (p.eprime - p.e) * p.d
    return p.a, p.c, p.e, p.eprime, x, y


def sl2_relation_residual(p):
    """|cx - ay - (e - e')| + |e e' - 1|."""
    a, c, e, ep, x, y = sl2_invariants(p)
    return abs(c * x - a * y - (e - ep)) + abs(e * ep - 1)


def sl2_quadric_coords(p):
    """(a, c, e, X, Y) with X = e x, Y = e y, which satisfy cX - aY = e^2 - 1."""
    a, c, e, _, x, y = sl2_invariants(p)
    if e == 0:
        raise ZeroE("quadric coordinates need e != 0")
    return a, c, e, e * x, e * y


def sl2_quadric_residual(p):
    a, c, e, big_x, big_y = sl2_quadric_coords(p)
    return abs(c * big_x - a * big_y - (e * e - 1))


@dataclass(frozen=True)
class RealSlice:
    """Output of :func:`sl2_real_slice`.

    ``compat_point`` is the SL(2) point with c = i conj(x), a = -i conj(y) on
    the sphere |x|^2 + |y|^2 = 2 sin(theta); it is None at the endpoints where
    that sphere collapses.
    """

    theta: float
    x: complex
    y: complex
    residual: float
    compat_point: SL2Point
    compat_residual: float


def sl2_real_slice(theta, u=None):
    """Check cx - ay = 2i sin(theta) at e = exp(i theta), e' = exp(-i theta), f = 0."""
    u = np.eye(2, dtype=np.complex128) if u is None else np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise NotUnitary("u must be 2x2")
    if np.linalg.norm(u.conj().T @ u - np.eye(2)) > 1e-9 or abs(np.linalg.det(u) - 1) > 1e-9:
        raise NotUnitary("u is not in SU(2)")
    e = np.exp(1j * theta)
    p = SL2Point(u[0, 0], u[0, 1], u[1, 0], u[1, 1], e, 0.0, 1 / e)
    a, c, _, _, x, y = sl2_invariants(p)
    target = 2j * np.sin(theta)
    residual = abs(c * x - a * y - target)

    s = np.sin(theta)
    compat, compat_res = None, 0.0
    norm = np.hypot(abs(x), abs(y))
    if s > 1e-12 and norm > 0:
        radius = np.sqrt(2 * s)
        xs, ys = x * radius / norm, y * radius / norm
        # b, d chosen so that x = (e' - e) b and y = (e' - e) d
        w = (1 / e) - e
        compat = SL2Point(-1j * np.conj(ys), xs / w, 1j * np.conj(xs), ys / w, e, 0.0, 1 / e)
        ca, cc, _, _, cx, cy = sl2_invariants(compat)
        compat_res = abs(cc * cx - ca * cy - target)
    return RealSlice(float(theta), complex(x), complex(y), float(residual), compat, float(compat_res))


def sl2_quiver_domain(a1, a2, b1, b2, tol=1e-12):
    """True iff |1 + a1 b1 + a2 b2| > tol, i.e. the length-one quiver C <-> C^2 lies in M_mult."""
    return abs(1 + a1 * b1 + a2 * b2) > tol
