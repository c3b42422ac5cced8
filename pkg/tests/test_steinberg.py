import numpy as np
import pytest
from hypothesis import given, strategies as st

from mquiver import cxmat
from mquiver.errors import InvalidPoint, InvalidTorusLevel, NotBorel, NotUnipotent
from mquiver.steinberg import (
    DoublePoint,
    TorusLevel,
    centralizer_dim,
    class_functions,
    double_moment_map,
    n_action,
    psi,
    regularity,
    springer_image,
    steinberg_membership,
    unipotent_residual,
)

V = np.array([[2, 1], [0, 0.5]])


def test_moment_map_examples():
    a, b = double_moment_map(DoublePoint(np.eye(2), V))
    assert np.allclose(a, V) and np.allclose(b, np.linalg.inv(V))
    g = cxmat.random_special_linear(2, np.random.default_rng(1))
    a, b = double_moment_map(DoublePoint(g, np.eye(2)))
    assert np.allclose(a, np.eye(2)) and np.allclose(b, np.eye(2))


def test_n_action_examples():
    p = DoublePoint(np.eye(2), V, borel=True)
    same = n_action(p, np.eye(2))
    assert np.array_equal(same.u, p.u) and np.array_equal(same.v, p.v)
    moved = n_action(p, np.array([[1, 3], [0, 1]]))
    assert np.allclose(moved.u, [[1, -3], [0, 1]])
    assert abs(moved.v[1, 0]) < 1e-15 and np.allclose(np.diag(moved.v), [2, 0.5])
    with pytest.raises(NotUnipotent):
        n_action(p, np.array([[1, 0], [1, 1]]))


def test_moment_map_n_invariance(rng):
    for _ in range(20):
        u = cxmat.random_special_linear(3, rng)
        v = np.triu(cxmat.random_complex((3, 3), rng), 1) + np.diag([2, 1j, -0.5j])
        p = DoublePoint(u, v, borel=True)
        moved = n_action(p, cxmat.random_unitriangular(3, rng, 2.0))
        a0, _ = double_moment_map(p)
        a1, _ = double_moment_map(moved)
        assert np.allclose(a0, a1, atol=1e-9)
        assert np.allclose(psi(p).lambdas, psi(moved).lambdas)


def test_psi_examples():
    assert psi(DoublePoint(np.eye(2), np.eye(2), borel=True)).lambdas == (1, 1)
    assert psi(DoublePoint(np.eye(2), V, borel=True)).lambdas == (2, 0.5)
    with pytest.raises(NotBorel):
        psi(DoublePoint(np.eye(2), V))


def test_point_validation():
    with pytest.raises(InvalidPoint):
        DoublePoint(np.eye(2), 2 * np.eye(2))
    with pytest.raises(NotBorel):
        DoublePoint(np.eye(2), np.array([[1, 0], [1, 1]]), borel=True)
    with pytest.raises(InvalidTorusLevel):
        TorusLevel((2, 2))


def test_class_function_examples():
    assert np.allclose(class_functions(np.eye(2)), [-2])
    assert np.allclose(class_functions(np.diag([2, 0.5])), [-2.5])
    assert np.allclose(class_functions([[1, 1], [0, 1]]), class_functions(np.eye(2)))


def test_membership_examples():
    lam = TorusLevel((2, 1j, -0.5j))
    assert steinberg_membership(lam.matrix(), lam) == 0.0
    assert steinberg_membership([[1, 1], [0, 1]], (1, 1)) == 0.0
    dev = steinberg_membership(np.diag([2, 0.5]), (1, 1))
    assert dev == pytest.approx(abs(-2.5 + 2) / 3)


def test_springer_examples(rng):
    lam = TorusLevel((3, 1 / 3))
    assert np.allclose(springer_image(np.eye(2), lam, np.eye(2)), lam.matrix())
    u = cxmat.random_special_linear(2, rng)
    img = springer_image(u, (1, 1), np.array([[1, 1], [0, 1]]))
    assert steinberg_membership(img, (1, 1)) <= 1e-9
    assert unipotent_residual(img) <= 1e-8


def test_centralizer_examples():
    assert centralizer_dim(np.eye(2)) == 3
    assert centralizer_dim(np.array([[1, 1], [0, 1]])) == 1
    assert regularity(np.array([[1, 1], [0, 1]])) == "regular"
    assert regularity(np.eye(3)) == "irregular"
    for n in range(2, 7):
        comp = np.zeros((n, n), dtype=complex)
        comp[1:, :-1] = np.eye(n - 1)
        comp[0, -1] = 1
        comp = comp / np.linalg.det(comp) ** (1 / n)
        assert centralizer_dim(comp) == n - 1


def test_regularity_indeterminate():
    m = np.diag([1 + 1e-8, 1 - 1e-8]).astype(complex)
    assert regularity(m) == "indeterminate"


def test_unipotent_examples():
    assert unipotent_residual(np.eye(3)) == 0.0
    assert unipotent_residual(np.array([[1, 5], [0, 1]])) == 0.0
    assert unipotent_residual(np.diag([2, 0.5])) > 0.1


def _generic_level(rng, n):
    lam = rng.uniform(0.5, 2, n) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    lam[-1] = 1 / np.prod(lam[:-1])
    return TorusLevel(tuple(lam))


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_springer_image_is_member(seed, n):
    rng = np.random.default_rng(seed)
    lam = _generic_level(rng, n)
    img = springer_image(cxmat.random_special_linear(n, rng), lam, cxmat.random_unitriangular(n, rng, 1.0))
    assert steinberg_membership(img, lam) <= 1e-8


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5))
def test_class_functions_conjugation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    m = cxmat.random_special_linear(n, rng, 5.0)
    g = cxmat.random_special_linear(n, rng, 10.0)
    a = class_functions(m)
    b = class_functions(g @ m @ np.linalg.inv(g))
    assert np.abs(a - b).max() <= 1e-8 * (1 + np.abs(a).max())
