import numpy as np
import pytest
from hypothesis import given, strategies as st

from mquiver import cxmat
from mquiver.errors import (
    ChainLengthMismatch,
    InvalidGauge,
    InvalidQuiver,
    InvalidScalars,
    NotASolution,
)
from mquiver.quiver import (
    GaugeElement,
    Quiver,
    ScalarChain,
    act_gauge,
    additive_residuals,
    eigenspace_decompose,
    endo_Y,
    equation_residual,
    gen_random,
    gen_toric,
    infer_scalars,
    minpoly_residual,
    residuals,
    stability_report,
    toric_products,
    vdb_moment_map,
    xk_chain,
    xk_recursion_residual,
)


def col(*x):
    return np.array(x, dtype=complex).reshape(-1, 1)


def row(*x):
    return np.array(x, dtype=complex).reshape(1, -1)


def small(alpha, beta):
    return Quiver((1, 2), (alpha,), (beta,))


@pytest.fixture
def q_two():
    """alpha = (0, 1)^T, beta = (0, 1): 1 + beta alpha = 2."""
    return small(col(0, 1), row(0, 1))


@pytest.fixture
def toric3():
    return gen_toric(3, ScalarChain((2, 3)))


def test_dims_must_increase():
    with pytest.raises(InvalidQuiver, match="dims not strictly increasing"):
        Quiver.zero((2, 1, 3))


def test_shape_mismatch_named():
    with pytest.raises(InvalidQuiver, match="alpha_1"):
        Quiver((1, 2), (row(1, 2),), (row(0, 1),))


def test_outside_m_mult_rejected():
    with pytest.raises(InvalidQuiver):
        small(col(1, 0), row(-1, 0))


def test_residual_examples(q_two, toric3):
    (r0,) = residuals(q_two, ScalarChain((2,)))
    assert r0.shape == (1, 1) and r0[0, 0] == 0
    z = Quiver.zero((1, 2, 3))
    assert all(np.all(r == 0) for r in residuals(z, ScalarChain((1, 1))))
    assert equation_residual(toric3, ScalarChain((2, 3))) < 1e-15


def test_chain_length_checked(q_two):
    with pytest.raises(ChainLengthMismatch):
        residuals(q_two, ScalarChain((2, 3)))


def test_infer_scalars_examples(toric3):
    s = infer_scalars(toric3)
    assert np.allclose(s.q, (2, 3))
    assert infer_scalars(Quiver.zero((1, 2, 3))).q == (1, 1)
    s = infer_scalars(small(col(1, 0), row(0, 1)))
    assert s.q == (1,)


def test_infer_scalars_rejects_non_solution():
    q = Quiver((1, 2, 3), (col(1, 0), np.eye(3)[:, :2] * 2), (row(0, 1), np.eye(3)[:2]))
    with pytest.raises(NotASolution):
        infer_scalars(q)


def test_gauge_examples(toric3, rng):
    assert act_gauge(toric3, GaugeElement.identity(toric3.dims)) == toric3
    g = GaugeElement.random(toric3.dims, rng)
    back = act_gauge(act_gauge(toric3, g), g.inverse())
    assert back.distance(toric3) < 1e-10
    assert equation_residual(act_gauge(toric3, g), ScalarChain((2, 3))) < 1e-8


def test_gauge_validation(rng):
    with pytest.raises(InvalidGauge):
        GaugeElement((np.eye(1), 2 * np.eye(2)))
    with pytest.raises(InvalidGauge):
        act_gauge(Quiver.zero((1, 3)), GaugeElement.identity((1, 2)))


def test_left_factor_acts_on_top(toric3, rng):
    left = cxmat.random_special_linear(3, rng)
    moved = act_gauge(toric3, left=left)
    assert np.allclose(moved.alphas[1], left @ toric3.alphas[1])
    assert np.allclose(endo_Y(moved), left @ endo_Y(toric3) @ np.linalg.inv(left))


def test_vdb_moment_map_examples():
    a, b = vdb_moment_map(np.zeros((2, 1)), np.zeros((1, 2)))
    assert np.array_equal(a, np.eye(1)) and np.array_equal(b, np.eye(2))
    a, b = vdb_moment_map(col(0, 1), row(0, 1))
    assert np.allclose(a, [[2]]) and np.allclose(b, np.diag([1, 0.5]))


def test_endo_y_examples(toric3):
    assert np.array_equal(endo_Y(Quiver.zero((1, 2, 3))), np.eye(3))
    assert np.allclose(endo_Y(toric3), np.diag([6, 3, 1]))
    assert np.allclose(endo_Y(small(col(5, 1), row(0, 1))), [[1, 5], [0, 2]])


def test_additive_examples(rng):
    lam, res = additive_residuals(Quiver.zero((1, 2, 3)))
    assert lam == (0, 0) and res == 0
    q, _ = gen_random(4, 3, diagonal=np.ones(4))
    lam, res = additive_residuals(q, lambdas=(0, 0, 0))
    assert res < 1e-10
    lam, res = additive_residuals(gen_toric(2, ScalarChain((3,))))
    assert lam[0] == pytest.approx(2) and res < 1e-15


def test_stability_examples(toric3):
    rep = stability_report(Quiver.zero((1, 2, 3)))
    assert not any(rep.alpha_injective) and not any(rep.beta_surjective)
    assert not rep.free and not rep.stable_h
    q, _ = gen_random(4, 1)
    rep = stability_report(q)
    assert all(rep.beta_surjective) and rep.stable_h
    rep = stability_report(toric3)
    assert rep.stable_full


def test_minpoly_examples():
    q = small(col(5, 1), row(0, 1))
    assert minpoly_residual(q, ScalarChain((2,))) == 0.0
    assert minpoly_residual(Quiver.zero((1, 2, 3)), ScalarChain((1, 1))) == 0.0


def test_xk_examples(q_two, toric3):
    xs, _ = xk_chain(q_two)
    x = xs[0]
    assert np.array_equal(x @ x, x)
    assert xk_recursion_residual(q_two, ScalarChain((2,))) == 0.0
    assert xk_recursion_residual(Quiver.zero((1, 2, 3)), ScalarChain((1, 1))) == 0.0
    assert xk_recursion_residual(toric3, ScalarChain((2, 3))) <= 1e-12


def test_xk_chain_matches_explicit_products(rng):
    q, _ = gen_random(4, 9)
    xs, _ = xk_chain(q)
    a1, a2, a3 = q.alphas
    b1, b2, b3 = q.betas
    assert np.allclose(xs[0], a3 @ b3)
    assert np.allclose(xs[1], a3 @ a2 @ b2 @ b3)
    assert np.allclose(xs[2], a3 @ a2 @ a1 @ b1 @ b2 @ b3)


def test_eigenspace_examples(q_two):
    s = ScalarChain((2,))
    dec = eigenspace_decompose(q_two, s, 2)
    assert dec.dims == (1, 1)
    assert abs(abs(dec.bases[1][1, 0]) - 1) < 1e-12
    assert dec.isomorphisms_ok() and dec.leakage == 0
    dec = eigenspace_decompose(q_two, s, 1)
    assert dec.dims == (0, 1)
    assert abs(abs(dec.bases[1][0, 0]) - 1) < 1e-12
    z = Quiver.zero((1, 2, 3))
    dec = eigenspace_decompose(z, ScalarChain((1, 1)), 1)
    assert dec.dims == (1, 2, 3)


def test_toric_products_examples():
    assert toric_products((2,)) == [[1]]
    assert toric_products((2, 3)) == [[1], [5, 2]]
    q = gen_toric(2, ScalarChain((1,)))
    assert q == Quiver.zero((1, 2))
    assert np.array_equal(endo_Y(q), np.eye(2))
    q = gen_toric(2, ScalarChain((2,)))
    assert q.alphas[0][0, 0] * q.betas[0][0, 0] == pytest.approx(1)


def test_toric_with_magnitudes():
    s = ScalarChain((2, 3))
    q = gen_toric(3, s, magnitudes=[[2], [1, 4]])
    assert equation_residual(q, s) < 1e-15
    assert q.alphas[1][1, 1] == 4


def test_gen_random_deterministic():
    a, sa = gen_random(3, 7)
    b, sb = gen_random(3, 7)
    assert a == b and sa == sb
    assert equation_residual(a, sa) <= 1e-10
    assert all(stability_report(a).beta_surjective)


def test_scalar_chain_validation():
    with pytest.raises(InvalidScalars):
        ScalarChain((0, 1))
    with pytest.raises(InvalidScalars):
        ScalarChain((4,), lifted=(1, 1))
    s = ScalarChain((4,), lifted=(0.5, 2))
    assert s[1] == 4
    assert list(s.borel_diagonal()) == [1, 4]
    assert ScalarChain((2, 3)).top_products() == [3, 6]


seeds = st.integers(0, 2**32 - 1)


@given(seed=seeds, n=st.integers(2, 6))
def test_generated_solutions_satisfy_identities(seed, n):
    q, s = gen_random(n, seed)
    assert equation_residual(q, s) <= 1e-10
    assert minpoly_residual(q, s) <= 1e-8
    assert xk_recursion_residual(q, s) <= 1e-8
    assert np.allclose(infer_scalars(q).q, s.q, rtol=1e-9)


@given(seed=seeds, n=st.integers(2, 5))
def test_gauge_invariance(seed, n):
    q, s = gen_random(n, seed)
    g = GaugeElement.random(q.dims, np.random.default_rng(seed))
    assert equation_residual(act_gauge(q, g), s) <= 1e-8


@given(seed=seeds, n=st.integers(2, 5))
def test_q_one_degenerates_to_additive(seed, n):
    q, s = gen_random(n, seed, diagonal=np.ones(n))
    assert s.q == (1,) * (n - 1)
    _, res = additive_residuals(q, lambdas=(0,) * (n - 1))
    assert res <= 1e-10


@given(seed=seeds, n=st.integers(2, 5))
def test_eigenspace_dims_sum(seed, n):
    q, s = gen_random(n, seed)
    taus = np.diag(endo_Y(q))
    totals = np.zeros(n, dtype=int)
    for tau in taus:
        dec = eigenspace_decompose(q, s, tau)
        totals += dec.dims
        assert dec.leakage <= 1e-8
    assert tuple(totals) == q.dims
