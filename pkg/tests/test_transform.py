import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphcs.fields import random_sparse_coefficients
from sphcs.transform import (BandLimit, FourierCoefficients, WignerCoefficients, a_to_b, b_to_a,
                             build_subspace_transform, sparsity_report, wigner_series)
from sphcs.wigner import InvalidIndexError, wigner_d


def torus_eval(b, alpha, beta, gamma):
    """Direct evaluation of the Fourier series of b at torus points."""
    k = np.arange(-b.n_max - 1, b.n_max + 1)
    e = lambda x: np.exp(-1j * np.multiply.outer(np.asarray(x), k))
    if b.dims == 2:
        return np.einsum("mp,sm,sp->s", b.values, e(gamma), e(beta))
    return np.einsum("mup,sm,su,sp->s", b.values, e(gamma), e(alpha), e(beta))


def random_dense(n_max, rng, mu_zero=False):
    a = WignerCoefficients(n_max)
    for n in range(n_max + 1):
        for m in range(-n, n + 1):
            for mu in ([0] if mu_zero else range(-n, n + 1)):
                a[n, m, mu] = rng.standard_normal() + 1j * rng.standard_normal()
    return a


def test_band_limit_counts():
    for n_max in range(6):
        bl = BandLimit(n_max)
        assert bl.n_wigner == sum((2 * n + 1) ** 2 for n in range(n_max + 1))
        assert bl.n_sh == sum(2 * n + 1 for n in range(n_max + 1))
        assert bl.n_fourier == (2 * n_max + 2) ** 3
    assert BandLimit(15).n_fourier_2d == 1024
    with pytest.raises(ValueError):
        BandLimit(-1)


@pytest.mark.parametrize("m,mu", [(0, 0), (2, -1), (-3, 3), (5, 0), (-6, -6)])
def test_block_matches_fft_of_d(m, mu):
    # B^{m mu}[m', n] are the Fourier coefficients of i^0 d_n^{mu m}(beta) in exp(-i m' beta)
    n_max = 6
    blk = build_subspace_transform(m, mu, n_max)
    N = 2 * n_max + 2
    beta = 2 * np.pi * np.arange(N) / N
    for col, n in enumerate(blk.orders):
        samples = wigner_d(n, mu, m, beta)
        coef = np.fft.fft(samples) / N    # coefficient of exp(+i k beta) sits at -k
        ref = np.array([coef[(-mp) % N] for mp in blk.mprime])
        np.testing.assert_allclose(blk.matrix[:, col], ref, atol=1e-14)


def test_block_support_and_shape():
    n_max = 7
    for m, mu in [(0, 0), (3, -2), (7, 1)]:
        blk = build_subspace_transform(m, mu, n_max)
        assert blk.matrix.shape == (2 * n_max + 2, n_max + 1 - max(abs(m), abs(mu)))
        assert not blk.matrix[0].any()                    # padded m' = -n_max - 1
        for col, n in enumerate(blk.orders):
            assert not blk.matrix[np.abs(blk.mprime) > n, col].any()
        assert np.linalg.matrix_rank(blk.matrix) == blk.matrix.shape[1]
    with pytest.raises(InvalidIndexError):
        build_subspace_transform(8, 0, 7)


@pytest.mark.parametrize("dims", [2, 3])
def test_synthesis_equivalence(dims):
    rng = np.random.default_rng(11)
    a = random_dense(4, rng, mu_zero=dims == 2)
    b = a_to_b(a)
    assert b.dims == dims
    al, be, ga = rng.uniform(-4, 4, (3, 40))
    if dims == 2:
        al = np.zeros_like(be)
    np.testing.assert_allclose(torus_eval(b, al, be, ga), wigner_series(a, al, be, ga), atol=1e-12)


def test_round_trip_dense_3d():
    a = random_dense(6, np.random.default_rng(3))
    back, rep = b_to_a(a_to_b(a), return_report=True)
    np.testing.assert_allclose(back.values, a.values, atol=1e-12)
    assert rep.flagged == [] and rep.max_residual < 1e-12


@settings(max_examples=40, deadline=None)
@given(n_max=st.integers(0, 9), s=st.integers(1, 60), seed=st.integers(0, 2**32 - 1), mu0=st.booleans())
def test_round_trip_property(n_max, s, seed, mu0):
    cap = (n_max + 1) ** 2 if mu0 else BandLimit(n_max).n_wigner
    a = random_sparse_coefficients(n_max, min(s, cap), seed=seed, mu_zero_only=mu0, random_phase=True)
    back = b_to_a(a_to_b(a))
    assert np.linalg.norm(back.values - a.values) <= 1e-12 * a.norm()


@settings(max_examples=60, deadline=None)
@given(n_max=st.integers(0, 15), s=st.integers(1, 256), seed=st.integers(0, 2**32 - 1))
def test_sparsity_bounds_property(n_max, s, seed):
    s = min(s, (n_max + 1) ** 2)
    rep = sparsity_report(random_sparse_coefficients(n_max, s, seed=seed))
    assert rep.s_D == s
    assert rep.s_F <= rep.subspace_bound <= rep.worst_case_bound
    assert rep.worst_case_bound == (2 * n_max + 2) * rep.n_mmu


def test_b_to_a_flags_inconsistent_blocks():
    b = a_to_b(random_dense(3, np.random.default_rng(0), mu_zero=True))
    b[-4, 0] = 1.0               # padded m block
    b[1, -4] = 1.0               # padded m' row inside a valid block
    _, rep = b_to_a(b, return_report=True)
    assert (-4, 0) in rep.flagged and (1, 0) in rep.flagged
    assert rep.residuals[(-4, 0)] == pytest.approx(1.0)


def test_b_to_a_is_least_squares():
    rng = np.random.default_rng(8)
    b = FourierCoefficients(4, 3, rng.standard_normal((10, 10, 10)) + 0j)
    a = b_to_a(b)
    for m, mu in [(0, 0), (2, -3)]:
        blk = build_subspace_transform(m, mu, 4)
        ref = np.linalg.lstsq(blk.matrix, b.block(m, mu), rcond=None)[0]
        np.testing.assert_allclose(a.values[blk.n_min:, m + 4, mu + 4], ref, atol=1e-12)


def test_coefficient_containers():
    a = WignerCoefficients(3)
    a[2, -1, 2] = 3 + 1j
    assert a[2, -1, 2] == 3 + 1j
    assert a.entries() == {(2, -1, 2): 3 + 1j}
    assert not a.mu_zero_only
    np.testing.assert_array_equal(WignerCoefficients.from_flat(3, a.flat()).values, a.values)
    assert WignerCoefficients.from_entries(3, a.entries()).norm() == pytest.approx(abs(3 + 1j))
    assert a.truncate(1).norm() == 0 and a.truncate(5)[2, -1, 2] == 3 + 1j
    with pytest.raises(InvalidIndexError):
        a[1, 2, 0] = 1
    bad = np.zeros((4, 7, 7))
    bad[0, 0, 0] = 1
    with pytest.raises(InvalidIndexError):
        WignerCoefficients(3, bad)
    with pytest.raises(ValueError):
        WignerCoefficients.from_flat(3, np.zeros(5))


def test_fourier_container_and_2d_guard():
    a = random_sparse_coefficients(3, 4, seed=1, mu_zero_only=False)
    if a.mu_zero_only:
        pytest.skip("draw happened to be mu = 0 only")
    with pytest.raises(ValueError):
        a_to_b(a, dims=2)
    b = a_to_b(a)
    np.testing.assert_array_equal(FourierCoefficients.from_flat(3, 3, b.flat()).values, b.values)
    assert b[0, 0, 0] == b.values[4, 4, 4]
    with pytest.raises(ValueError):
        FourierCoefficients(3, 4)


def test_sparsity_report_fourier_only():
    b = a_to_b(random_sparse_coefficients(5, 1, seed=0))
    rep = sparsity_report(b=b)
    assert 1 <= rep.s_F <= 2 * 5 + 1 and rep.s_D == 0
    with pytest.raises(ValueError):
        sparsity_report()


def test_subspace_blocks_are_well_conditioned():
    from sphcs.transform import build_subspace_transform
    conds = [build_subspace_transform(m, mu, 15).condition_number for m in range(-15, 16) for mu in (0, 3, -7)]
    assert 1.0 <= min(conds) and max(conds) < 10
    sv = np.linalg.svd(build_subspace_transform(0, 0, 15).matrix, compute_uv=False)
    assert build_subspace_transform(0, 0, 15).condition_number == pytest.approx(sv[0] / sv[-1])
