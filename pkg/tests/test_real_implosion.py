import numpy as np
import pytest

from mquiver.errors import InvalidAlcovePoint, NotUnitModulus
from mquiver.normal_form import BorelElement, cover_rho, reconstruct_from_borel
from mquiver.quiver import Quiver, ScalarChain, endo_Y, equation_residual
from mquiver.real_implosion import (
    AlcovePoint,
    alcove_grid,
    alcove_to_b1,
    branch_sqrt,
    forward_residual,
    hjs_toric_quiver,
    measured_stabilizer_dim,
    qs_from_alcove,
    quiver_decomposition,
    stabilizer_check,
    stratum_of,
)

PI = np.pi
W = np.exp(-2j * PI / 3)


def multiset_gap(a, b):
    """Largest distance in a greedy nearest matching of two equal-size lists."""
    rest = list(b)
    worst = 0.0
    for x in a:
        j = int(np.argmin([abs(x - y) for y in rest]))
        worst = max(worst, abs(x - rest.pop(j)))
    return worst


def refines(fine, coarse):
    return all(any(set(f) <= set(c) for c in coarse) for f in fine)


def test_alcove_validation():
    with pytest.raises(InvalidAlcovePoint):
        AlcovePoint((1.0, 0.0))
    with pytest.raises(InvalidAlcovePoint):
        AlcovePoint((-1.0, 1.0))
    with pytest.raises(InvalidAlcovePoint):
        AlcovePoint((4.0, -4.0))


def test_alcove_to_b1_examples():
    assert np.array_equal(alcove_to_b1(AlcovePoint((0, 0, 0))).m, np.eye(3))
    # SU(2) case: the cover sends diag(e^{i theta}, e^{-i theta}) to (1, e^{-2 i theta})
    assert np.allclose(alcove_to_b1(AlcovePoint((PI / 2, -PI / 2))).m, np.diag([1, -1]))
    y = alcove_to_b1(AlcovePoint((2 * PI / 3, 0, -2 * PI / 3)))
    assert np.allclose(y.diagonal, [1, W, W**2])


def test_alcove_to_b1_matches_cover(rng):
    for p in alcove_grid(3, 12):
        z = np.diag(np.exp(1j * np.array(p.thetas)))
        assert np.allclose(cover_rho(BorelElement(z, "B")).m, alcove_to_b1(p).m, atol=1e-12)


def test_qs_examples():
    assert qs_from_alcove(AlcovePoint((0, 0))).q == (1,)
    assert qs_from_alcove(AlcovePoint((PI / 2, -PI / 2))).q[0] == pytest.approx(-1)
    q = qs_from_alcove(AlcovePoint((2 * PI / 3, 0, -2 * PI / 3))).q
    assert q == pytest.approx((W, W))


def test_qs_agree_with_reconstruction():
    for p in alcove_grid(4, 12):
        _, s = reconstruct_from_borel(alcove_to_b1(p))
        assert np.allclose(s.q, qs_from_alcove(p).q, atol=1e-12)


def test_branch_sqrt():
    assert branch_sqrt(-2) == pytest.approx(1j * np.sqrt(2))
    assert branch_sqrt(-2) ** 2 == pytest.approx(-2)
    assert branch_sqrt(-1j).imag > 0
    assert branch_sqrt(0) == 0


def test_unit_circle_quiver_examples():
    q = hjs_toric_quiver(ScalarChain((-1,)))
    nu, mu = q.alphas[0][0, 0], q.betas[0][0, 0]
    assert nu == pytest.approx(1j * np.sqrt(2)) and mu * nu == pytest.approx(-2)
    assert hjs_toric_quiver(ScalarChain((1,))) == Quiver.zero((1, 2))
    s = ScalarChain((W, W))
    assert equation_residual(hjs_toric_quiver(s), s) <= 1e-12
    with pytest.raises(NotUnitModulus):
        hjs_toric_quiver(ScalarChain((2,)))


def test_stratum_examples():
    phi = 0.8
    # Y diagonal (1, 1, e^{i phi}): theta = (t, t, t + phi) shifted to sum zero
    th = np.array([0.0, 0.0, -phi])
    th -= th.mean()
    st = stratum_of(AlcovePoint(tuple(th)))
    assert st.runs == ((1, 2), (3,))
    assert st.collapsed_dims == (1, 3)
    assert st.stabilizer_blocks == (2, 1) and st.predicted_dim == 3
    st = stratum_of(AlcovePoint((1.0, 0.0, -1.0)))
    assert st.is_interior and st.predicted_dim == 0
    st = stratum_of(AlcovePoint((0.0, 0.0, 0.0)))
    assert st.is_vertex and st.stabilizer_blocks == (3,) and st.predicted_dim == 8


def test_affine_wall_run_wraps():
    # theta_3 = theta_1 - 2 pi puts w_1 and w_3 in one class
    st = stratum_of(AlcovePoint((PI, 0.0, -PI)))
    assert st.runs == ((1, 3), (2,))
    assert st.collapsed_dims == (1, 2, 3)


def test_stabilizer_examples():
    check = stabilizer_check(AlcovePoint((0.7, -0.7)))
    assert check.measured_dim == 0 == check.predicted_dim
    check = stabilizer_check(AlcovePoint((0.0, 0.0)))
    assert check.measured_dim == 3 == check.predicted_dim
    th = np.array([0.0, 0.0, -0.8])
    th -= th.mean()
    p = AlcovePoint(tuple(th))
    q = hjs_toric_quiver(qs_from_alcove(p))
    assert forward_residual(q, stratum_of(p).runs) <= 1e-9
    assert measured_stabilizer_dim(q) >= 3


def test_grid_properties():
    for n in (2, 3, 4):
        for p in alcove_grid(n, 24):
            s = qs_from_alcove(p)
            q = hjs_toric_quiver(s)
            assert equation_residual(q, s) <= 1e-10
            assert multiset_gap(np.diag(endo_Y(q)), alcove_to_b1(p).diagonal) <= 1e-9


def test_vertices_degenerate():
    for n in (2, 3, 4):
        for p in alcove_grid(n, 24):
            st = stratum_of(p)
            if st.is_vertex:
                q = hjs_toric_quiver(qs_from_alcove(p))
                assert all(not a.any() for a in q.alphas) and all(not b.any() for b in q.betas)
                assert np.allclose(alcove_to_b1(p).m, np.eye(n))


def test_perturbation_refines():
    for n in (2, 3, 4):
        # evenly spaced interior point
        inner = 0.9 * PI * (n + 1 - 2 * np.arange(1, n + 1)) / n
        for p in alcove_grid(n, 12):
            st = stratum_of(p)
            if st.is_interior:
                continue
            eps = 1e-6
            moved = AlcovePoint(tuple((1 - eps) * np.array(p.thetas) + eps * inner))
            fine = stratum_of(moved)
            assert refines(fine.runs, st.runs) and len(fine.runs) > len(st.runs)


def test_decomposition_on_non_wrapping_strata():
    for n in (2, 3):
        for p in alcove_grid(n, 12):
            st = stratum_of(p)
            wraps = any(1 in r and n in r for r in st.runs) and not st.is_vertex
            ok, dims = quiver_decomposition(hjs_toric_quiver(qs_from_alcove(p)))
            if not wraps:
                assert ok
            assert dims[-1] == n
