"""Wigner d/D functions, half-angle Delta tables and spherical Hankel functions.

Conventions follow the zyz' Euler parametrisation::

    D_n^{mu m}(alpha, beta, gamma) = exp(-1j*mu*alpha) d_n^{mu m}(beta) exp(-1j*m*gamma)

The real d-function is evaluated from the finite sigma-sum in the half angles
cos(beta/2), sin(beta/2). The factorial prefactors of every sigma term are
formed with exact integer arithmetic and rounded once, so nothing overflows up
to n = 64 and each coefficient is correct to one ulp. The alternating sum
itself cancels badly for large n (about 1e-9 absolute at n = 32), so orders
above ``SIGMA_SUM_MAX_ORDER`` switch to the Jacobi-polynomial form.
"""
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np
from scipy.special import eval_jacobi

__all__ = [
    "InvalidIndexError",
    "ConsistencyError",
    "MAX_ORDER",
    "wigner_d",
    "wigner_D",
    "delta_matrix",
    "delta_stack",
    "wigner_d_fourier_synthesis",
    "spherical_hankel1",
    "spherical_hankel1_orders",
]

MAX_ORDER = 64
SIGMA_SUM_MAX_ORDER = 20
FOURIER_IDENTITY_TOL = 1e-10


class InvalidIndexError(ValueError):
    """Raised for (n, mu, m) outside 0 <= n, |mu| <= n, |m| <= n."""


class ConsistencyError(ArithmeticError):
    """Raised when a numerical identity check fails its tolerance."""


def _check_index(n, mu, m):
    n, mu, m = int(n), int(mu), int(m)
    if n < 0 or n > MAX_ORDER:
        raise InvalidIndexError(f"order n={n} outside [0, {MAX_ORDER}]")
    if abs(mu) > n or abs(m) > n:
        raise InvalidIndexError(f"|mu|, |m| must not exceed n: (n, mu, m)=({n}, {mu}, {m})")
    return n, mu, m


@lru_cache(maxsize=None)
def _sigma_terms(n, mu, m):
    """Signed coefficients and half-angle powers of the sigma-sum.

    Returns arrays ``coef, cos_pow, sin_pow`` such that
    ``d = sum(coef * cos(b/2)**cos_pow * sin(b/2)**sin_pow)``.
    """
    f = math.factorial
    num = f(n + m) * f(n - m) * f(n + mu) * f(n - mu)
    lo, hi = max(0, m - mu), min(n + m, n - mu)
    coef, cpow, spow = [], [], []
    for s in range(lo, hi + 1):
        den = f(s) * f(n + m - s) * f(n - mu - s) * f(mu - m + s)
        mag = math.sqrt(Fraction(num, den * den))
        sign = -1.0 if (mu - m + s) % 2 else 1.0
        coef.append(sign * mag)
        cpow.append(2 * n - 2 * s + m - mu)
        spow.append(2 * s - m + mu)
    return np.array(coef), np.array(cpow), np.array(spow)


@lru_cache(maxsize=None)
def _jacobi_params(n, mu, m):
    k = min(n + m, n - m, n + mu, n - mu)
    if k == n + m:
        a, lam = mu - m, mu - m
    elif k == n - m:
        a, lam = m - mu, 0
    elif k == n + mu:
        a, lam = m - mu, 0
    else:
        a, lam = mu - m, mu - m
    b = 2 * n - 2 * k - a
    pref = math.sqrt(Fraction(math.comb(2 * n - k, k + a), math.comb(k + b, b)))
    return k, a, b, (-1.0) ** lam * pref


def _wigner_d_sum(n, mu, m, beta):
    coef, cpow, spow = _sigma_terms(n, mu, m)
    c = np.cos(0.5 * beta)[..., None]
    s = np.sin(0.5 * beta)[..., None]
    return np.sum(coef * c**cpow * s**spow, axis=-1)


def _wigner_d_jacobi(n, mu, m, beta):
    k, a, b, pref = _jacobi_params(n, mu, m)
    return (pref * np.sin(0.5 * beta) ** a * np.cos(0.5 * beta) ** b
            * eval_jacobi(k, a, b, np.cos(beta)))


def wigner_d(n, mu, m, beta, method="auto"):
    """Real Wigner d-function d_n^{mu m}(beta).

    ``beta`` may be a scalar or an array and is not restricted to [0, pi];
    for integer n the function is 2*pi periodic in beta.

    ``method`` is ``"sum"`` (sigma-sum), ``"jacobi"`` or ``"auto"``, which
    uses the sigma-sum up to ``SIGMA_SUM_MAX_ORDER``.
    """
    n, mu, m = _check_index(n, mu, m)
    beta = np.asarray(beta, dtype=float)
    if method == "auto":
        method = "sum" if n <= SIGMA_SUM_MAX_ORDER else "jacobi"
    if method == "sum":
        out = _wigner_d_sum(n, mu, m, beta)
    elif method == "jacobi":
        out = _wigner_d_jacobi(n, mu, m, beta)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if out.ndim == 0 else out


def wigner_D(n, mu, m, alpha, beta, gamma):
    """Wigner D-function exp(-i mu alpha) d_n^{mu m}(beta) exp(-i m gamma)."""
    d = wigner_d(n, mu, m, beta)
    out = np.exp(-1j * mu * np.asarray(alpha)) * d * np.exp(-1j * m * np.asarray(gamma))
    return complex(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def _delta_exact(n):
    f = math.factorial
    size = 2 * n + 1
    table = np.zeros((size, size))
    four_n = 4**n
    for mp in range(-n, n + 1):
        for m in range(-n, n + 1):
            num = f(n + m) * f(n - m) * f(n + mp) * f(n - mp)
            lo, hi = max(0, m - mp), min(n + m, n - mp)
            acc = Fraction(0)
            for s in range(lo, hi + 1):
                den = f(s) * f(n + m - s) * f(n - mp - s) * f(mp - m + s)
                acc += Fraction(-1 if s % 2 else 1, den)
            if acc == 0:
                continue
            # at beta = pi/2 both half-angle factors are 2**-1/2, so the whole
            # sigma-sum is one exact rational times sqrt(num) / 2**n
            val = math.sqrt(acc * acc * num / four_n)
            sign = (-1) ** ((mp - m) % 2) * (1 if acc > 0 else -1)
            table[mp + n, m + n] = sign * val
    table.setflags(write=False)
    return table


def delta_matrix(n):
    """Table Delta_n[m' + n, m + n] = d_n^{m' m}(pi/2), read-only and cached."""
    n, _, _ = _check_index(n, 0, 0)
    return _delta_exact(n)


@lru_cache(maxsize=None)
def delta_stack(n_max):
    """All Delta tables up to ``n_max`` zero-padded into one array.

    Shape ``(n_max + 1, 2*n_max + 1, 2*n_max + 1)`` with entry
    ``[n, m' + n_max, m + n_max]``; entries with |m'| > n or |m| > n are zero.
    """
    size = 2 * n_max + 1
    out = np.zeros((n_max + 1, size, size))
    for n in range(n_max + 1):
        lo = n_max - n
        out[n, lo:lo + 2 * n + 1, lo:lo + 2 * n + 1] = delta_matrix(n)
    out.setflags(write=False)
    return out


def wigner_d_fourier_synthesis(n, mu, m, beta, tol=FOURIER_IDENTITY_TOL):
    """Evaluate d_n^{mu m}(beta) through its finite Fourier series in beta.

    Uses ``i**(mu - m) * sum_{m'} Delta[m', mu] Delta[m', m] exp(-i m' beta)``.
    The imaginary part must vanish; a residue above ``tol`` raises
    ConsistencyError.
    """
    n, mu, m = _check_index(n, mu, m)
    delta = delta_matrix(n)
    weights = delta[:, mu + n] * delta[:, m + n]
    mprime = np.arange(-n, n + 1)
    beta = np.asarray(beta, dtype=float)
    series = np.exp(-1j * np.multiply.outer(beta, mprime)) @ weights
    val = 1j ** ((mu - m) % 4) * series
    resid = np.max(np.abs(np.imag(val))) if val.size else 0.0
    if resid > tol:
        raise ConsistencyError(f"imaginary residue {resid:.3e} exceeds {tol:.1e}")
    val = np.real(val)
    return float(val) if val.ndim == 0 else val


def spherical_hankel1_orders(n_max, x):
    """h_n^{(1)}(x) for n = 0..n_max by upward recurrence.

    Returns an array of shape ``(n_max + 1,) + shape(x)``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("spherical Hankel argument must be positive")
    out = np.empty((n_max + 1,) + x.shape, dtype=complex)
    eix = np.exp(1j * x)
    out[0] = -1j * eix / x
    if n_max >= 1:
        out[1] = -(1 / x + 1j / x**2) * eix
    for n in range(1, n_max):
        out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out


def spherical_hankel1(n, x):
    """Spherical Hankel function of the first kind, h_n^{(1)}(x) = j_n + i y_n."""
    n = int(n)
    if n < 0:
        raise InvalidIndexError(f"order n={n} must be non-negative")
    out = spherical_hankel1_orders(n, x)[n]
    return complex(out) if out.ndim == 0 else out
