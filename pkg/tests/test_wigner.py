import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import sph_harm_y, spherical_jn, spherical_yn, roots_legendre

from sphcs.wigner import (ConsistencyError, InvalidIndexError, MAX_ORDER, delta_matrix, delta_stack,
                          spherical_hankel1, spherical_hankel1_orders, wigner_D, wigner_d,
                          wigner_d_fourier_synthesis)


def d1(mu, m, b):
    c, s = np.cos(b), np.sin(b)
    table = {(1, 1): (1 + c) / 2, (1, 0): -s / np.sqrt(2), (1, -1): (1 - c) / 2, (0, 0): c}
    return _from_table(table, mu, m)


def d2(mu, m, b):
    c, s = np.cos(b), np.sin(b)
    table = {
        (2, 2): ((1 + c) / 2) ** 2, (2, 1): -(1 + c) * s / 2, (2, 0): np.sqrt(3 / 8) * s**2,
        (2, -1): -(1 - c) * s / 2, (2, -2): ((1 - c) / 2) ** 2,
        (1, 1): (1 + c) * (2 * c - 1) / 2, (1, 0): -np.sqrt(1.5) * s * c, (1, -1): (1 - c) * (2 * c + 1) / 2,
        (0, 0): (3 * c**2 - 1) / 2,
    }
    return _from_table(table, mu, m)


def _from_table(table, mu, m):
    # fill the rest from d_{mu m} = (-1)^(m-mu) d_{m mu} = d_{-m,-mu}
    for (a, b), v in list(table.items()):
        table.setdefault((b, a), (-1) ** (a - b) * v)
        table.setdefault((-b, -a), v)
        table.setdefault((-a, -b), (-1) ** (a - b) * v)
    return table[(mu, m)]


BETAS = np.linspace(-3.0, 6.0, 13)


@pytest.mark.parametrize("n,closed", [(1, d1), (2, d2)])
def test_low_order_closed_forms(n, closed):
    for mu in range(-n, n + 1):
        for m in range(-n, n + 1):
            np.testing.assert_allclose(wigner_d(n, mu, m, BETAS), closed(mu, m, BETAS), atol=1e-15)


def test_d0_is_one():
    assert wigner_d(0, 0, 0, 1.234) == pytest.approx(1.0)


def test_spherical_harmonic_relation():
    # conj(D_n^{0m}(0, theta, phi)) * sqrt((2n+1)/4pi) = (-1)^m Y_n^m(theta, phi)
    rng = np.random.default_rng(5)
    th, ph = rng.uniform(0, np.pi, 20), rng.uniform(0, 2 * np.pi, 20)
    for n in range(0, 9):
        for m in range(-n, n + 1):
            lhs = np.conj(wigner_D(n, 0, m, 0.0, th, ph)) * np.sqrt((2 * n + 1) / (4 * np.pi))
            np.testing.assert_allclose(lhs, (-1) ** m * sph_harm_y(n, m, th, ph), atol=1e-13)


def test_orthogonality_by_quadrature():
    x, w = roots_legendre(40)
    beta = np.arccos(x)
    for mu, m in [(0, 0), (1, -1), (2, 3)]:
        ns = range(max(abs(mu), abs(m)), 12)
        g = np.array([[np.sum(w * wigner_d(a, mu, m, beta) * wigner_d(b, mu, m, beta)) for b in ns] for a in ns])
        np.testing.assert_allclose(g, np.diag([2 / (2 * a + 1) for a in ns]), atol=1e-14)


@pytest.mark.parametrize("n", [1, 5, 12, 20])
def test_sum_and_jacobi_routes_agree(n):
    b = np.linspace(0, 2 * np.pi, 17)
    for mu in range(-n, n + 1, max(1, n // 4)):
        for m in range(-n, n + 1, max(1, n // 3)):
            np.testing.assert_allclose(wigner_d(n, mu, m, b, method="sum"),
                                       wigner_d(n, mu, m, b, method="jacobi"), atol=1e-12)


def test_high_order_unitarity():
    # rows of d_n(beta) are orthonormal for any beta; checks the Jacobi route at large n
    for n in (32, 48, MAX_ORDER):
        k = np.arange(-n, n + 1)
        d = np.array([[wigner_d(n, a, b, 0.731) for b in k] for a in k])
        np.testing.assert_allclose(d @ d.T, np.eye(2 * n + 1), atol=1e-12)


def test_delta_small_values():
    s = np.sqrt(0.5)
    np.testing.assert_allclose(delta_matrix(1), [[0.5, s, 0.5], [-s, 0, s], [0.5, -s, 0.5]], atol=1e-16)


@pytest.mark.parametrize("n", [3, 16, 40, MAX_ORDER])
def test_delta_orthogonal_and_involutive(n):
    d = delta_matrix(n)
    np.testing.assert_allclose(d @ d.T, np.eye(2 * n + 1), atol=1e-14)
    # d(pi/2)^2 = d(pi), whose entries are (-1)^(n+m) on the anti-diagonal
    k = np.arange(-n, n + 1)
    np.testing.assert_allclose(d @ d, np.fliplr(np.diag((-1.0) ** (n + k))), atol=1e-13)


def test_delta_matches_d_at_half_pi():
    for n in (2, 7, 11):
        k = range(-n, n + 1)
        ref = np.array([[wigner_d(n, a, b, np.pi / 2) for b in k] for a in k])
        np.testing.assert_allclose(delta_matrix(n), ref, atol=1e-14)


def test_delta_read_only_and_stack_layout():
    d = delta_matrix(4)
    with pytest.raises(ValueError):
        d[0, 0] = 1.0
    st_ = delta_stack(6)
    assert st_.shape == (7, 13, 13)
    np.testing.assert_array_equal(st_[4, 2:11, 2:11], d)
    assert not st_[4, :2].any() and not st_[0, :6].any()


def test_fourier_identity_frozen_point():
    # d_3^{1,-2}(0.9) from the closed sigma-sum, evaluated independently in high precision
    import mpmath as mp
    mp.mp.dps = 40
    n, mu, m, b = 3, 1, -2, mp.mpf("0.9")
    f = mp.factorial
    c, s = mp.cos(b / 2), mp.sin(b / 2)
    tot = 0
    for k in range(0, n + 1):
        if n + m - k < 0 or n - mu - k < 0 or mu - m + k < 0:
            continue
        tot += (-1) ** (mu - m + k) * c ** (2 * n + m - mu - 2 * k) * s ** (mu - m + 2 * k) / (
            f(k) * f(n + m - k) * f(n - mu - k) * f(mu - m + k))
    ref = float(mp.sqrt(f(n + mu) * f(n - mu) * f(n + m) * f(n - m)) * tot)
    assert wigner_d_fourier_synthesis(n, mu, m, 0.9) == pytest.approx(ref, abs=1e-15)
    assert wigner_d(n, mu, m, 0.9) == pytest.approx(ref, abs=1e-15)


def test_fourier_identity_raises_on_tiny_tolerance():
    with pytest.raises(ConsistencyError):
        wigner_d_fourier_synthesis(9, 3, -4, 1.1, tol=0.0)


@pytest.mark.parametrize("bad", [(-1, 0, 0), (2, 3, 0), (2, 0, -3), (MAX_ORDER + 1, 0, 0)])
def test_invalid_index(bad):
    with pytest.raises(InvalidIndexError):
        wigner_d(*bad, 0.3)


def test_invalid_method():
    with pytest.raises(ValueError):
        wigner_d(2, 0, 0, 0.3, method="nope")


indices = st.integers(0, 24).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(-n, n), st.integers(-n, n)))


@settings(max_examples=200, deadline=None)
@given(idx=indices, beta=st.floats(-10, 10))
def test_d_symmetries(idx, beta):
    n, mu, m = idx
    v = wigner_d(n, mu, m, beta)
    assert abs(v) <= 1 + 1e-12
    assert wigner_d(n, m, mu, beta) == pytest.approx((-1) ** (mu - m) * v, abs=1e-11)
    assert wigner_d(n, -m, -mu, beta) == pytest.approx(v, abs=1e-11)
    assert wigner_d(n, m, mu, -beta) == pytest.approx(v, abs=1e-11)
    assert wigner_d(n, mu, m, beta + 2 * np.pi) == pytest.approx(v, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(idx=indices, beta=st.floats(-7, 7))
def test_fourier_identity_property(idx, beta):
    n, mu, m = idx
    assert wigner_d_fourier_synthesis(n, mu, m, beta) == pytest.approx(wigner_d(n, mu, m, beta), abs=1e-10)


def test_wigner_D_phases():
    v = wigner_D(3, 2, -1, 0.3, 0.8, 1.7)
    assert v == pytest.approx(np.exp(-2j * 0.3) * wigner_d(3, 2, -1, 0.8) * np.exp(1j * 1.7))


def test_spherical_hankel_against_scipy():
    x = np.array([0.3, 1.0, 7.5, 16.0, 40.0])
    h = spherical_hankel1_orders(20, x)
    for n in range(21):
        ref = spherical_jn(n, x) + 1j * spherical_yn(n, x)
        np.testing.assert_allclose(h[n], ref, rtol=1e-10)
    assert spherical_hankel1(4, 2.5) == pytest.approx(spherical_jn(4, 2.5) + 1j * spherical_yn(4, 2.5))


def test_spherical_hankel_rejects_bad_input():
    with pytest.raises(ValueError):
        spherical_hankel1_orders(3, 0.0)
    with pytest.raises(InvalidIndexError):
        spherical_hankel1(-1, 1.0)
