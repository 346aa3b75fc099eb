"""Sub-sampled unitary DFT measurement operator and measurement simulation.

The operator maps scaled Fourier coefficients ``b' = sqrt(N) b`` (canonical
flat order of :class:`~sphcs.transform.FourierCoefficients`) to field samples
on the selected grid rows::

    y = P_Omega U b',    U = F / sqrt(N),   N = L**dims

where F is the unnormalised DFT synthesis matrix restricted to the Nyquist
frequency cube. With ``oversample == 1`` U is square and unitary; otherwise
its columns are orthonormal.
"""
from dataclasses import dataclass, field

import numpy as np

from .grid import SampleGrid, physical_map, _rng
from .transform import FourierCoefficients, wigner_series

__all__ = ["DftOperator", "MeasurementSet", "simulate", "noise_std_from_db", "field_peak", "EPS_FACTOR"]

# per-sample noise bound used as epsilon: |eta| <= 3 sigma holds for ~99.9 %
# of circular Gaussian draws
EPS_FACTOR = 3.0


class DftOperator:
    """P_Omega U restricted to the (2 n_max + 2)**dims Nyquist frequencies."""

    def __init__(self, grid, rows=None):
        self.grid = grid
        self.n_max = grid.n_max
        self.dims = grid.dims
        self.oversample = grid.oversample
        self.rows = np.arange(grid.size) if rows is None else np.asarray(rows, dtype=np.int64)
        side = 2 * self.n_max + 2
        self.freq_shape = (side,) * self.dims
        L = grid.points_per_axis
        k = np.arange(-self.n_max - 1, self.n_max + 1) % L
        # canonical b axes are (m, mu, m') / (m, m'); grid axes are
        # (alpha<-mu, beta<-m', gamma<-m) / (beta<-m', gamma<-m)
        self._perm = (1, 2, 0) if self.dims == 3 else (1, 0)
        self._bins = np.ix_(*([k] * self.dims))
        self._scale = 1.0 / np.sqrt(grid.size)

    @classmethod
    def from_selection(cls, selection):
        return cls(selection.grid, selection.rows)

    @property
    def shape(self):
        return (len(self.rows), int(np.prod(self.freq_shape)))

    @property
    def tight(self):
        """True when the rows are orthonormal (A A* = I)."""
        return self.oversample == 1

    def _check(self, x, n):
        x = np.asarray(x)
        if x.shape != (n,):
            raise ValueError(f"expected vector of length {n}, got shape {x.shape}")
        return x

    def forward(self, x):
        x = self._check(x, self.shape[1]).reshape(self.freq_shape).transpose(self._perm)
        cube = np.zeros(self.grid.shape, dtype=complex)
        cube[self._bins] = x
        return np.fft.fftn(cube).ravel()[self.rows] * self._scale

    def adjoint(self, y):
        y = self._check(y, self.shape[0])
        cube = np.zeros(self.grid.size, dtype=complex)
        cube[self.rows] = y
        cube = np.fft.ifftn(cube.reshape(self.grid.shape)) * (self.grid.size * self._scale)
        inv = np.argsort(self._perm)
        return cube[self._bins].transpose(inv).ravel()

    __matmul__ = forward

    def matrix(self):
        """Dense matrix built from the explicit exponential sum (small sizes only)."""
        side = 2 * self.n_max + 2
        L = self.grid.points_per_axis
        sig = self.grid.signed_indices(self.rows)  # (dims, M)
        f = np.arange(-self.n_max - 1, self.n_max + 1)
        if self.dims == 3:
            m, mu, mp = (g.ravel() for g in np.meshgrid(f, f, f, indexing="ij"))
            phase = np.outer(sig[0], mu) + np.outer(sig[1], mp) + np.outer(sig[2], m)
        else:
            m, mp = (g.ravel() for g in np.meshgrid(f, f, indexing="ij"))
            phase = np.outer(sig[0], mp) + np.outer(sig[1], m)
        assert phase.shape[1] == side**self.dims
        return np.exp(-2j * np.pi * phase / L) * self._scale

    def norm_estimate(self, iters=20, seed=0):
        """Spectral norm by power iteration on A* A."""
        x = _rng(seed).standard_normal(self.shape[1]) + 0j
        x /= np.linalg.norm(x)
        s = 0.0
        for _ in range(iters):
            x = self.adjoint(self.forward(x))
            s = np.linalg.norm(x)
            if s == 0:
                return 0.0
            x /= s
        return float(np.sqrt(s))

    def lift(self):
        """Equivalent tight problem on the full L**dims frequency grid.

        Returns ``(big, support, embed, restrict)``: ``big`` has orthonormal
        rows, ``support`` marks the Nyquist frequencies in its domain, and
        ``embed``/``restrict`` move vectors between the two domains.
        """
        big = _FullGridDft(self.grid, self.rows)
        flat_bins = np.ravel_multi_index(
            tuple(np.broadcast_arrays(*self._bins)), self.grid.shape).transpose(np.argsort(self._perm)).ravel()
        support = np.zeros(self.grid.size, dtype=bool)
        support[flat_bins] = True

        def embed(x):
            out = np.zeros(self.grid.size, dtype=complex)
            out[flat_bins] = x
            return out

        def restrict(x):
            return np.asarray(x)[flat_bins]

        return big, support, embed, restrict

    def coefficient_scale(self):
        """sqrt(N) with b' = sqrt(N) b."""
        return 1.0 / self._scale

    def to_scaled(self, b):
        return b.flat() * self.coefficient_scale()

    def from_scaled(self, x):
        return FourierCoefficients.from_flat(self.n_max, self.dims, np.asarray(x) / self.coefficient_scale())


class _FullGridDft:
    """Row subset of the unitary DFT on the whole oversampled grid."""

    tight = True

    def __init__(self, grid, rows):
        self.grid = grid
        self.rows = rows
        self.shape = (len(rows), grid.size)
        self._scale = 1.0 / np.sqrt(grid.size)

    def forward(self, x):
        return np.fft.fftn(np.asarray(x).reshape(self.grid.shape)).ravel()[self.rows] * self._scale

    def adjoint(self, y):
        cube = np.zeros(self.grid.size, dtype=complex)
        cube[self.rows] = y
        return np.fft.ifftn(cube.reshape(self.grid.shape)).ravel() * (self.grid.size * self._scale)


@dataclass
class MeasurementSet:
    """Samples at selected grid rows together with the noise description."""

    grid: SampleGrid
    rows: np.ndarray
    values: np.ndarray
    noise_std: float = 0.0
    eps: float = 0.0
    noise_model: str = "shared-circular-gaussian"
    seed: object = None
    meta: dict = field(default_factory=dict)

    @property
    def m_rows(self):
        return len(self.rows)


def noise_std_from_db(peak, db):
    """Noise standard deviation ``db`` decibels (amplitude) relative to ``peak``."""
    return float(peak) * 10.0 ** (db / 20.0)


def field_peak(a, grid, pmap=None):
    """Max |field| over all physical points of ``grid``."""
    if pmap is None:
        pmap = physical_map(grid)
    al, be, ga = grid.angles(pmap.representative)
    return float(np.max(np.abs(wigner_series(a, al, be, ga)))) if a.entries() else 0.0


def simulate(a, selection, noise_std=0.0, seed=None, shared_noise=True, pmap=None,
             eps_factor=EPS_FACTOR):
    """Sample the Wigner series ``a`` at the selected rows and add noise.

    The field is evaluated once per physical pose, directly from the Wigner
    series. With ``shared_noise`` every torus row of a pose carries the same
    noisy reading; otherwise each row draws its own noise. Noise is circular
    complex Gaussian with E|eta|^2 = noise_std**2.
    """
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    grid = selection.grid
    if grid.dims == 2 and not a.mu_zero_only:
        raise ValueError("2D grids carry mu = 0 series only")
    if pmap is None:
        pmap = physical_map(grid)
    classes, inv = np.unique(selection.classes, return_inverse=True)
    al, be, ga = grid.angles(pmap.representative[classes])
    clean = wigner_series(a, al, be, ga)
    rng = _rng(seed)
    n_draw = len(classes) if shared_noise else len(selection.rows)
    noise = np.zeros(n_draw, dtype=complex)
    if noise_std > 0:
        noise = (rng.standard_normal(n_draw) + 1j * rng.standard_normal(n_draw)) * (noise_std / np.sqrt(2))
    if shared_noise:
        values = (clean + noise)[inv]
    else:
        values = clean[inv] + noise
    return MeasurementSet(
        grid, selection.rows.copy(), values, float(noise_std), eps_factor * float(noise_std),
        "shared-circular-gaussian" if shared_noise else "independent-circular-gaussian",
        selection.seed,
    )
