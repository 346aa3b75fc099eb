"""Plain-text readers and writers.

All files are whitespace-separated columns with ``#``-prefixed ``key=value``
header lines. Floats are written with 17 significant digits so that a write
followed by a read reproduces every value bit for bit.

    coefficients   n m mu re im          header n_max
    fourier        mp m mu re im         header n_max, dims
    sh input       n m re im             header n_max
    selection      j k l alpha beta gamma class_id
    measurements   row_index re im       header grid spec, seed, noise_std, eps
"""
import numpy as np

from .fields import SpeakerModel, R_AB, wavenumber, PROBE_FREQUENCY
from .grid import SampleGrid, physical_map
from .operator import MeasurementSet
from .transform import FourierCoefficients, WignerCoefficients
from .wigner import MAX_ORDER, spherical_hankel1_orders

__all__ = [
    "FormatError",
    "write_coefficients",
    "read_coefficients",
    "write_fourier",
    "read_fourier",
    "write_sh_coefficients",
    "read_sh_coefficients",
    "load_sh_coefficients",
    "write_selection",
    "write_measurements",
    "read_measurements",
]

FLOAT = "%.17g"


class FormatError(ValueError):
    pass


def _open_w(path):
    return open(path, "w", encoding="ascii")


def _header(fh, **meta):
    for k, v in meta.items():
        fh.write(f"# {k}={v}\n")


def _read(path, ncols):
    """Header dict and (rows, ncols) float array."""
    meta, rows = {}, []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#") or "=" in line:
                body = line.lstrip("#").strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            parts = line.split()
            if len(parts) != ncols:
                raise FormatError(f"{path}:{lineno}: expected {ncols} columns, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    return meta, np.array(rows, dtype=float).reshape(-1, ncols)


def _int_col(col, path):
    out = np.rint(col).astype(np.int64)
    if np.any(out != col):
        raise FormatError(f"{path}: non-integer index column")
    return out


def _n_max(meta, path):
    try:
        return int(meta["n_max"])
    except (KeyError, ValueError):
        raise FormatError(f"{path}: missing or invalid n_max header") from None


def write_coefficients(path, a):
    with _open_w(path) as fh:
        _header(fh, n_max=a.n_max)
        for (n, m, mu), v in sorted(a.entries().items()):
            fh.write(f"{n} {m} {mu} {FLOAT % v.real} {FLOAT % v.imag}\n")


def read_coefficients(path):
    meta, data = _read(path, 5)
    n_max = _n_max(meta, path)
    a = WignerCoefficients(n_max)
    idx = [_int_col(data[:, i], path) for i in range(3)]
    for n, m, mu, re, im in zip(*idx, data[:, 3], data[:, 4]):
        a[n, m, mu] = complex(re, im)
    return a


def write_fourier(path, b):
    with _open_w(path) as fh:
        _header(fh, n_max=b.n_max, dims=b.dims)
        for pos in zip(*np.nonzero(b.values)):
            v = b.values[pos]
            k = [int(p) - b.offset for p in pos]
            m, mu, mp = (k[0], 0, k[1]) if b.dims == 2 else k
            fh.write(f"{mp} {m} {mu} {FLOAT % v.real} {FLOAT % v.imag}\n")


def read_fourier(path):
    meta, data = _read(path, 5)
    n_max = _n_max(meta, path)
    dims = int(meta.get("dims", 3))
    b = FourierCoefficients(n_max, dims)
    mp, m, mu = (_int_col(data[:, i], path) for i in range(3))
    lim = n_max + 1
    for cols in (mp, m, mu):
        if np.any((cols < -lim) | (cols >= lim)):
            raise FormatError(f"{path}: frequency index outside [-{lim}, {lim - 1}]")
    if dims == 2 and np.any(mu != 0):
        raise FormatError(f"{path}: 2D Fourier file with mu != 0")
    vals = data[:, 3] + 1j * data[:, 4]
    for i in range(len(vals)):
        key = (m[i], mp[i]) if dims == 2 else (m[i], mu[i], mp[i])
        b[key] = vals[i]
    return b


def write_sh_coefficients(path, speaker):
    with _open_w(path) as fh:
        _header(fh, n_max=speaker.n_max)
        for n in range(speaker.n_max + 1):
            for m in range(-n, n + 1):
                v = speaker[n, m]
                fh.write(f"{n} {m} {FLOAT % v.real} {FLOAT % v.imag}\n")


def read_sh_coefficients(path, n_max=None):
    """Raw ``n m re im`` table as a SpeakerModel (no scaling), truncated to ``n_max``."""
    meta, data = _read(path, 4)
    file_nmax = _n_max(meta, path)
    if file_nmax > MAX_ORDER:
        raise FormatError(f"{path}: n_max={file_nmax} exceeds supported maximum {MAX_ORDER}")
    n, m = _int_col(data[:, 0], path), _int_col(data[:, 1], path)
    if np.any(n < 0) or np.any(n > file_nmax) or np.any(np.abs(m) > n):
        raise FormatError(f"{path}: index outside 0 <= |m| <= n <= n_max")
    n_max = file_nmax if n_max is None else int(n_max)
    keep = n <= n_max
    vals = np.zeros((n_max + 1, 2 * n_max + 1), dtype=complex)
    vals[n[keep], m[keep] + n_max] = data[keep, 2] + 1j * data[keep, 3]
    return SpeakerModel(n_max, vals)


def load_sh_coefficients(path, r_ab=R_AB, k=None, n_max=15, frequency=PROBE_FREQUENCY):
    """Read measured SH coefficients and convert them to unit-norm SW coefficients.

    Rows with n > ``n_max`` are dropped, each order is divided by
    h_n(k r_ab) and the result is normalised.
    """
    if k is None:
        k = wavenumber(frequency)
    spk = read_sh_coefficients(path, n_max)
    h = spherical_hankel1_orders(spk.n_max, k * r_ab)
    out = SpeakerModel(spk.n_max, spk.values / h[:, None], frequency, str(path))
    if out.norm() == 0:
        raise FormatError(f"{path}: all coefficients are zero")
    return out.normalized()


def write_selection(path, selection, pmap=None):
    grid = selection.grid
    if pmap is None:
        pmap = physical_map(grid)
    pos = grid.signed_indices(selection.rows)
    al, be, ga = grid.angles(selection.rows)
    with _open_w(path) as fh:
        _header(fh, n_max=grid.n_max, oversample=grid.oversample, dims=grid.dims, seed=selection.seed)
        fh.write("# columns=j k l alpha beta gamma class_id\n")
        for i in range(len(selection.rows)):
            j, kk, ll = (0, pos[0, i], pos[1, i]) if grid.dims == 2 else pos[:, i]
            fh.write(f"{j} {kk} {ll} {FLOAT % al[i]} {FLOAT % be[i]} {FLOAT % ga[i]} {selection.classes[i]}\n")


def write_measurements(path, ms):
    g = ms.grid
    with _open_w(path) as fh:
        _header(fh, n_max=g.n_max, oversample=g.oversample, dims=g.dims, seed=ms.seed,
                noise_std=FLOAT % ms.noise_std, eps=FLOAT % ms.eps, noise_model=ms.noise_model)
        for r, v in zip(ms.rows, ms.values):
            fh.write(f"{r} {FLOAT % v.real} {FLOAT % v.imag}\n")


def read_measurements(path):
    meta, data = _read(path, 3)
    try:
        grid = SampleGrid(int(meta["n_max"]), int(meta.get("oversample", 1)), int(meta.get("dims", 3)))
    except (KeyError, ValueError):
        raise FormatError(f"{path}: missing grid header") from None
    rows = _int_col(data[:, 0], path)
    if len(rows) and (rows.min() < 0 or rows.max() >= grid.size or len(np.unique(rows)) != len(rows)):
        raise FormatError(f"{path}: rows must be distinct and inside the grid")
    seed = meta.get("seed", "None")
    seed = None if seed == "None" else (int(seed) if seed.lstrip("-").isdigit() else seed)
    return MeasurementSet(grid, rows, data[:, 1] + 1j * data[:, 2], float(meta.get("noise_std", 0)),
                          float(meta.get("eps", 0)), meta.get("noise_model", "shared-circular-gaussian"), seed)
