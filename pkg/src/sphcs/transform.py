"""Coefficient containers and the Wigner-to-Fourier basis change.

A band-limited Wigner series

    w(alpha, beta, gamma) = sum_{n, m, mu} a_n^{m mu} D_n^{mu m}(alpha, beta, gamma)

extended to beta in [0, 2*pi) is a trigonometric polynomial on the 3-torus,

    w = sum_{m, mu, m'} b_{m'}^{m mu} exp(-i (m gamma + mu alpha + m' beta)),

with all three frequencies in [-n_max - 1, n_max]. The map a -> b is block
diagonal over (m, mu); each block B^{m mu} is a tall real-times-phase matrix
built from the half-angle Delta tables.

Storage conventions
-------------------
``WignerCoefficients.values[n, m + n_max, mu + n_max]``; invalid slots
(|m| > n or |mu| > n) are held at zero. The canonical flat ordering runs over
(m, mu) lexicographically, then n ascending from max(|m|, |mu|).

``FourierCoefficients.values`` has axes (m, mu, m') for ``dims=3`` and
(m, m') for ``dims=2`` (the mu = 0 slice), each axis of length 2*n_max + 2 with
offset n_max + 1. Its canonical flat ordering is C order of that array.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .wigner import InvalidIndexError, delta_stack, wigner_d

__all__ = [
    "BandLimit",
    "WignerCoefficients",
    "FourierCoefficients",
    "SubspaceTransform",
    "ProjectionReport",
    "SparsityReport",
    "build_subspace_transform",
    "a_to_b",
    "b_to_a",
    "sparsity_report",
    "wigner_series",
    "nonzero_threshold",
]

RELATIVE_ZERO = 1e-12


@dataclass(frozen=True)
class BandLimit:
    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValueError(f"n_max must be a non-negative integer, got {self.n_max}")

    @property
    def n_wigner(self):
        n = self.n_max
        return (n + 1) * (2 * n + 1) * (2 * n + 3) // 3

    @property
    def n_sh(self):
        return (self.n_max + 1) ** 2

    @property
    def side(self):
        return 2 * self.n_max + 2

    @property
    def n_fourier(self):
        return self.side**3

    @property
    def n_fourier_2d(self):
        return self.side**2


def _valid_mask(n_max):
    n = np.arange(n_max + 1)[:, None, None]
    k = np.arange(-n_max, n_max + 1)
    return (np.abs(k)[None, :, None] <= n) & (np.abs(k)[None, None, :] <= n)


@lru_cache(maxsize=None)
def _flat_index(n_max):
    """(n, m_idx, mu_idx) triples in canonical flat order."""
    idx = []
    for m in range(-n_max, n_max + 1):
        for mu in range(-n_max, n_max + 1):
            for n in range(max(abs(m), abs(mu)), n_max + 1):
                idx.append((n, m + n_max, mu + n_max))
    return tuple(np.array(idx).T)


@dataclass
class WignerCoefficients:
    """Coefficients a_n^{m mu} of a band-limited Wigner D series."""

    n_max: int
    values: np.ndarray = None

    def __post_init__(self):
        BandLimit(self.n_max)
        shape = (self.n_max + 1, 2 * self.n_max + 1, 2 * self.n_max + 1)
        if self.values is None:
            self.values = np.zeros(shape, dtype=complex)
        else:
            self.values = np.asarray(self.values, dtype=complex)
            if self.values.shape != shape:
                raise ValueError(f"expected shape {shape}, got {self.values.shape}")
            if np.any(self.values[~_valid_mask(self.n_max)] != 0):
                raise InvalidIndexError("nonzero coefficient at an invalid (n, m, mu) slot")

    @classmethod
    def from_entries(cls, n_max, entries):
        """Build from a mapping ``{(n, m, mu): value}``."""
        out = cls(n_max)
        for (n, m, mu), val in entries.items():
            out[n, m, mu] = val
        return out

    @classmethod
    def from_flat(cls, n_max, flat):
        out = cls(n_max)
        flat = np.asarray(flat, dtype=complex)
        idx = _flat_index(n_max)
        if flat.shape != (len(idx[0]),):
            raise ValueError(f"flat vector must have length {len(idx[0])}")
        out.values[idx] = flat
        return out

    def _slot(self, key):
        n, m, mu = (int(k) for k in key)
        if not (0 <= n <= self.n_max and abs(m) <= n and abs(mu) <= n):
            raise InvalidIndexError(f"invalid index (n, m, mu)=({n}, {m}, {mu}) for n_max={self.n_max}")
        return n, m + self.n_max, mu + self.n_max

    def __getitem__(self, key):
        return self.values[self._slot(key)]

    def __setitem__(self, key, value):
        self.values[self._slot(key)] = value

    @property
    def band_limit(self):
        return BandLimit(self.n_max)

    def flat(self):
        return self.values[_flat_index(self.n_max)].copy()

    def entries(self):
        """Nonzero entries as ``{(n, m, mu): value}``."""
        n, mi, ui = np.nonzero(self.values)
        return {(int(a), int(b) - self.n_max, int(c) - self.n_max): complex(self.values[a, b, c])
                for a, b, c in zip(n, mi, ui)}

    def copy(self):
        return WignerCoefficients(self.n_max, self.values.copy())

    def norm(self):
        return float(np.linalg.norm(self.values))

    @property
    def mu_zero_only(self):
        mask = np.ones(2 * self.n_max + 1, dtype=bool)
        mask[self.n_max] = False
        return not np.any(self.values[:, :, mask])

    def truncate(self, n_max):
        """Copy restricted (or zero-extended) to band limit ``n_max``."""
        out = WignerCoefficients(n_max)
        k = min(n_max, self.n_max)
        src = self.values[:k + 1, self.n_max - k:self.n_max + k + 1, self.n_max - k:self.n_max + k + 1]
        out.values[:k + 1, n_max - k:n_max + k + 1, n_max - k:n_max + k + 1] = src
        return out


@dataclass
class FourierCoefficients:
    """Coefficients b_{m'}^{m mu} on the frequency cube [-n_max-1, n_max]^dims."""

    n_max: int
    dims: int = 3
    values: np.ndarray = None

    def __post_init__(self):
        BandLimit(self.n_max)
        if self.dims not in (2, 3):
            raise ValueError("dims must be 2 or 3")
        shape = (2 * self.n_max + 2,) * self.dims
        if self.values is None:
            self.values = np.zeros(shape, dtype=complex)
        else:
            self.values = np.asarray(self.values, dtype=complex)
            if self.values.shape != shape:
                raise ValueError(f"expected shape {shape}, got {self.values.shape}")

    @property
    def offset(self):
        return self.n_max + 1

    def __getitem__(self, key):
        return self.values[tuple(int(k) + self.offset for k in key)]

    def __setitem__(self, key, value):
        self.values[tuple(int(k) + self.offset for k in key)] = value

    def flat(self):
        return self.values.ravel().copy()

    @classmethod
    def from_flat(cls, n_max, dims, flat):
        side = 2 * n_max + 2
        return cls(n_max, dims, np.asarray(flat, dtype=complex).reshape((side,) * dims))

    def copy(self):
        return FourierCoefficients(self.n_max, self.dims, self.values.copy())

    def block(self, m, mu=0):
        """The m' column b^{m mu} (length 2*n_max + 2)."""
        if self.dims == 2:
            if mu != 0:
                return np.zeros(2 * self.n_max + 2, dtype=complex)
            return self.values[m + self.offset]
        return self.values[m + self.offset, mu + self.offset]

    def norm(self):
        return float(np.linalg.norm(self.values))


@lru_cache(maxsize=None)
def _transform_tensor(n_max):
    """T[m, mu, m', n] = i^(mu-m) Delta_n[m', mu] Delta_n[m', m] on the padded cube.

    Axes m, mu, m' run over [-n_max - 1, n_max]; the padded index -n_max - 1
    carries zeros.
    """
    side = 2 * n_max + 2
    delta = delta_stack(n_max)                     # [n, m', k]
    core = np.einsum("npu,npm->mupn", delta, delta)  # [m, mu, m', n]
    k = np.arange(-n_max, n_max + 1)
    phase = 1j ** ((k[None, :] - k[:, None]) % 4)  # [m, mu] -> i^(mu - m)
    out = np.zeros((side, side, side, n_max + 1), dtype=complex)
    out[1:, 1:, 1:, :] = phase[:, :, None, None] * core
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SubspaceTransform:
    """Block B^{m mu}: rows m' = -n_max-1..n_max, columns n = n_min..n_max."""

    m: int
    mu: int
    n_max: int
    matrix: np.ndarray

    @property
    def n_min(self):
        return max(abs(self.m), abs(self.mu))

    @property
    def orders(self):
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def mprime(self):
        return np.arange(-self.n_max - 1, self.n_max + 1)

    @property
    def condition_number(self):
        """2-norm condition number (ratio of extreme singular values)."""
        return float(np.linalg.cond(self.matrix))


@lru_cache(maxsize=None)
def build_subspace_transform(m, mu, n_max):
    """Matrix B^{m mu} of shape (2*n_max + 2, n_max + 1 - max(|m|, |mu|))."""
    if abs(m) > n_max or abs(mu) > n_max:
        raise InvalidIndexError(f"(m, mu)=({m}, {mu}) outside band limit {n_max}")
    n_min = max(abs(m), abs(mu))
    off = n_max + 1
    mat = _transform_tensor(n_max)[m + off, mu + off, :, n_min:].copy()
    mat.setflags(write=False)
    return SubspaceTransform(m, mu, n_max, mat)


def a_to_b(a, dims=None):
    """Fourier coefficients of the periodically extended Wigner series.

    ``dims`` defaults to 2 when ``a`` has only mu = 0 entries, else 3.
    """
    if dims is None:
        dims = 2 if a.mu_zero_only else 3
    n_max = a.n_max
    tensor = _transform_tensor(n_max)
    side = 2 * n_max + 2
    if dims == 2:
        if not a.mu_zero_only:
            raise ValueError("2D Fourier coefficients require mu = 0 only")
        vals = np.zeros((side, side), dtype=complex)
        off = n_max + 1
        # only the mu = 0 slice of T is needed
        vals[1:] = np.einsum("mpn,nm->mp", tensor[1:, off], a.values[:, :, n_max])
        return FourierCoefficients(n_max, 2, vals)
    vals = np.zeros((side,) * 3, dtype=complex)
    vals[1:, 1:] = np.einsum("mupn,nmu->mup", tensor[1:, 1:], a.values)
    return FourierCoefficients(n_max, 3, vals)


@lru_cache(maxsize=None)
def _block_qr(m, mu, n_max):
    q, r = np.linalg.qr(build_subspace_transform(m, mu, n_max).matrix)
    return q, r


@dataclass
class ProjectionReport:
    residuals: dict = field(default_factory=dict)
    flagged: list = field(default_factory=list)
    tol: float = 1e-9

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)


def b_to_a(b, tol=1e-9, return_report=False):
    """Least-squares Wigner coefficients from Fourier coefficients.

    Each (m, mu) block is solved independently against B^{m mu} by QR. Blocks
    whose residual exceeds ``tol * max(1, ||b||)`` are listed in the report's
    ``flagged`` field; this is informational, never an error.
    """
    n_max = b.n_max
    a = WignerCoefficients(n_max)
    report = ProjectionReport(tol=tol)
    scale = tol * max(1.0, b.norm())
    mus = [0] if b.dims == 2 else range(-n_max - 1, n_max + 1)
    for m in range(-n_max - 1, n_max + 1):
        for mu in mus:
            blk = b.block(m, mu)
            if not np.any(blk):
                continue
            if m == -n_max - 1 or mu == -n_max - 1:
                res = float(np.linalg.norm(blk))
            else:
                q, r = _block_qr(m, mu, n_max)
                coef = q.conj().T @ blk
                x = np.linalg.solve(r, coef)
                n_min = max(abs(m), abs(mu))
                a.values[n_min:, m + n_max, mu + n_max] = x
                res = float(np.linalg.norm(blk - q @ coef))
            report.residuals[(m, mu)] = res
            if res > scale:
                report.flagged.append((m, mu))
    return (a, report) if return_report else a


def nonzero_threshold(values, rel=RELATIVE_ZERO):
    peak = np.max(np.abs(values)) if np.size(values) else 0.0
    return rel * peak


@dataclass(frozen=True)
class SparsityReport:
    s_D: int
    s_F: int
    n_mmu: int
    subspace_bound: int      # sum over occupied (m, mu) of 2 n_max^{m mu} + 1
    worst_case_bound: int    # (2 n_max + 2) * n_mmu


def sparsity_report(a=None, b=None, rel=RELATIVE_ZERO):
    """Sparsity of a set of coefficients in the Wigner and Fourier bases.

    Pass ``a`` (Fourier coefficients are derived), ``b`` alone, or both. With
    ``b`` alone only ``s_F`` is meaningful; the other fields are zero.
    """
    if a is None and b is None:
        raise ValueError("need a or b")
    if b is None:
        b = a_to_b(a)
    s_F = int(np.count_nonzero(np.abs(b.values) > nonzero_threshold(b.values, rel)))
    if a is None:
        return SparsityReport(0, s_F, 0, 0, 0)
    mag = np.abs(a.values)
    nz = mag > nonzero_threshold(a.values, rel)
    s_D = int(nz.sum())
    occupied = nz.any(axis=0)                    # [m, mu]
    n_mmu = int(occupied.sum())
    orders = np.arange(a.n_max + 1)[:, None, None]
    top = np.where(nz, orders, -1).max(axis=0)   # highest nonzero n per block
    bound = int(np.sum(2 * top[occupied] + 1))
    return SparsityReport(s_D, s_F, n_mmu, bound, (2 * a.n_max + 2) * n_mmu)


def wigner_series(a, alpha, beta, gamma):
    """Direct evaluation of sum a_n^{m mu} D_n^{mu m}(alpha, beta, gamma).

    Angles broadcast to a common shape. Uses the d-function sum directly and
    never touches the Fourier route, so it serves as an independent oracle.
    """
    alpha, beta, gamma = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, beta, gamma)))
    shape = beta.shape
    alpha, beta, gamma = alpha.ravel(), beta.ravel(), gamma.ravel()
    ub, inv = np.unique(beta, return_inverse=True)
    out = np.zeros(beta.shape, dtype=complex)
    entries = a.entries()
    if not entries:
        return out.reshape(shape)
    mus = {mu for (_, _, mu) in entries}
    ms = {m for (_, m, _) in entries}
    ea = {mu: np.exp(-1j * mu * alpha) for mu in mus}
    eg = {m: np.exp(-1j * m * gamma) for m in ms}
    for (n, m, mu), val in entries.items():
        d = wigner_d(n, mu, m, ub)[inv]
        out += val * ea[mu] * d * eg[m]
    return out.reshape(shape)
