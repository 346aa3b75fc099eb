import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphcs.fields import random_sparse_coefficients
from sphcs.grid import SampleGrid, build_grid, physical_map, select_rows, selection_from_rows
from sphcs.operator import DftOperator, field_peak, noise_std_from_db, simulate
from sphcs.transform import a_to_b, wigner_series


def test_grid_geometry():
    g = build_grid(3, 2, 3)
    assert g.points_per_axis == 16 and g.shape == (16, 16, 16) and g.size == 4096
    rows = np.arange(g.size)
    j, k, l = g.signed_indices(rows)
    assert j.min() == -8 and j.max() == 7
    np.testing.assert_array_equal(g.rows_of(j, k, l), rows)
    al, be, ga = g.angles(rows[:5])
    np.testing.assert_allclose(ga, 2 * np.pi * np.arange(5) / 16)
    assert not al.any() and not be.any()
    for bad in [dict(n_max=-1), dict(n_max=2, oversample=0), dict(n_max=2, dims=4), dict(n_max=2, oversample=1.5)]:
        with pytest.raises(ValueError):
            SampleGrid(**bad)


@pytest.mark.parametrize("dims", [2, 3])
def test_physical_classes(dims):
    g = build_grid(5, 1, dims)
    pm = physical_map(g)
    L = g.points_per_axis
    sizes = pm.class_sizes
    assert sizes.sum() == g.size
    assert np.all(sizes[~pm.polar] == 2)
    if dims == 2:
        assert pm.polar.sum() == 2 and np.all(sizes[pm.polar] == L)
        assert pm.n_classes == (g.size - 2 * L) // 2 + 2
    else:
        # each pole splits into L classes of L rows
        assert pm.polar.sum() == 2 * L and np.all(sizes[pm.polar] == L)
    _, be, _ = g.angles(pm.representative)
    # beta in [0, pi] modulo 2 pi (the south pole sits at signed index -L/2)
    assert np.all(np.sin(be) >= -1e-12)


@pytest.mark.parametrize("dims", [2, 3])
def test_field_constant_on_classes(dims):
    g = build_grid(4, 2, dims)
    pm = physical_map(g)
    a = random_sparse_coefficients(4, 12, seed=2, mu_zero_only=dims == 2, random_phase=True)
    f = wigner_series(a, *g.angles())
    for c in range(pm.n_classes):
        vals = f[pm.class_of == c]
        assert np.ptp(vals.real) < 1e-12 and np.ptp(vals.imag) < 1e-12


def test_select_rows_reproducible_and_validated():
    g = build_grid(3, 1, 2)
    s1, s2 = select_rows(g, 20, seed=4), select_rows(g, 20, seed=4)
    np.testing.assert_array_equal(s1.rows, s2.rows)
    assert len(np.unique(s1.rows)) == 20 and np.all(np.diff(s1.rows) > 0)
    assert s1.m_phys <= s1.m_rows
    for m in (0, g.size + 1):
        with pytest.raises(ValueError):
            select_rows(g, m)
    with pytest.raises(ValueError):
        selection_from_rows(g, [1, 1])


@pytest.mark.parametrize("q,dims", [(1, 2), (2, 2), (1, 3), (3, 3)])
def test_operator_matches_naive_matrix(q, dims):
    g = build_grid(2, q, dims)
    sel = select_rows(g, min(40, g.size), seed=0)
    op = DftOperator.from_selection(sel)
    A = op.matrix()
    rng = np.random.default_rng(1)
    x = rng.standard_normal(op.shape[1]) + 1j * rng.standard_normal(op.shape[1])
    y = rng.standard_normal(op.shape[0]) + 1j * rng.standard_normal(op.shape[0])
    np.testing.assert_allclose(op.forward(x), A @ x, atol=1e-12)
    np.testing.assert_allclose(op.adjoint(y), A.conj().T @ y, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(q=st.integers(1, 3), dims=st.sampled_from([2, 3]), seed=st.integers(0, 10**6))
def test_adjoint_dot_product(q, dims, seed):
    g = build_grid(3, q, dims)
    rng = np.random.default_rng(seed)
    op = DftOperator(g, np.sort(rng.choice(g.size, size=min(g.size, 50), replace=False)))
    x = rng.standard_normal(op.shape[1]) + 1j * rng.standard_normal(op.shape[1])
    y = rng.standard_normal(op.shape[0]) + 1j * rng.standard_normal(op.shape[0])
    lhs, rhs = np.vdot(y, op.forward(x)), np.vdot(op.adjoint(y), x)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_tightness_and_column_orthonormality():
    g1 = build_grid(3, 1, 2)
    full = DftOperator(g1)
    assert full.tight
    A = full.matrix()
    np.testing.assert_allclose(A @ A.conj().T, np.eye(g1.size), atol=1e-12)
    g2 = build_grid(3, 2, 2)
    over = DftOperator(g2)
    assert not over.tight
    B = over.matrix()
    np.testing.assert_allclose(B.conj().T @ B, np.eye(B.shape[1]), atol=1e-12)
    assert over.norm_estimate() == pytest.approx(1.0, abs=1e-9)


def test_lift_reproduces_operator():
    g = build_grid(2, 2, 3)
    op = DftOperator(g, select_rows(g, 100, seed=3).rows)
    big, support, embed, restrict = op.lift()
    rng = np.random.default_rng(0)
    x = rng.standard_normal(op.shape[1]) + 1j * rng.standard_normal(op.shape[1])
    np.testing.assert_allclose(big.forward(embed(x)), op.forward(x), atol=1e-13)
    y = rng.standard_normal(op.shape[0]) + 0j
    np.testing.assert_allclose(restrict(big.adjoint(y)), op.adjoint(y), atol=1e-13)
    assert support.sum() == op.shape[1]
    np.testing.assert_array_equal(restrict(embed(x)), x)


def test_operator_shape_checks():
    op = DftOperator(build_grid(2, 1, 2))
    with pytest.raises(ValueError):
        op.forward(np.zeros(3))
    with pytest.raises(ValueError):
        op.adjoint(np.zeros(3))


@pytest.mark.parametrize("q", [1, 2])
def test_simulate_matches_operator(q):
    g = build_grid(4, q, 2)
    a = random_sparse_coefficients(4, 9, seed=5, random_phase=True)
    sel = select_rows(g, 60, seed=1)
    ms = simulate(a, sel)
    op = DftOperator.from_selection(sel)
    np.testing.assert_allclose(ms.values, op.forward(op.to_scaled(a_to_b(a))), atol=1e-12)
    assert ms.noise_std == 0 and ms.eps == 0


def test_noise_shared_per_class_and_calibrated():
    g = build_grid(4, 1, 2)
    pm = physical_map(g)
    a = random_sparse_coefficients(4, 5, seed=0)
    sel = selection_from_rows(g, np.arange(g.size), pm)
    clean = simulate(a, sel, pmap=pm).values
    noisy = simulate(a, sel, 0.5, seed=2, pmap=pm)
    eta = noisy.values - clean
    for c in range(pm.n_classes):
        assert np.ptp(eta[pm.class_of == c].real) == 0
    assert noisy.eps == pytest.approx(1.5)
    indep = simulate(a, sel, 0.5, seed=2, shared_noise=False, pmap=pm).values - clean
    assert np.mean(np.abs(indep) ** 2) == pytest.approx(0.25, rel=0.15)
    assert np.ptp(indep[pm.class_of == 0].real) > 0
    with pytest.raises(ValueError):
        simulate(a, sel, -1.0)


def test_simulate_rejects_3d_series_on_2d_grid():
    a = random_sparse_coefficients(3, 30, seed=0, mu_zero_only=False)
    with pytest.raises(ValueError):
        simulate(a, select_rows(build_grid(3, 1, 2), 10, seed=0))


def test_noise_level_helpers():
    assert noise_std_from_db(2.0, -40) == pytest.approx(0.02)
    g = build_grid(3, 1, 2)
    a = random_sparse_coefficients(3, 1, seed=0)
    assert field_peak(a, g) > 0
