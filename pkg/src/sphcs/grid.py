"""Equiangular torus grids, their double-cover identification, and row sampling.

A grid with ``L = oversample * (2*n_max + 2)`` points per axis samples the
angles ``2*pi*j/L`` for signed indices j = -L/2 .. L/2-1. Rows are numbered in
C order over the *unsigned* positions ``j mod L`` so that row r of the grid is
output bin r of an unshifted FFT. Axis order is (alpha, beta, gamma) in 3D and
(beta, gamma) in 2D.

With beta running over a full period the torus covers SO(3) (or the sphere)
twice: (alpha, beta, gamma) and (alpha + pi, -beta, gamma - pi) are the same
pose, and at the poles whole lines of torus points collapse onto one pose.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["SampleGrid", "PhysicalMap", "SampleSelection", "build_grid", "physical_map", "select_rows"]


@dataclass(frozen=True)
class SampleGrid:
    n_max: int
    oversample: int = 1
    dims: int = 3

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        if int(self.oversample) != self.oversample or self.oversample < 1:
            raise ValueError("oversample must be a positive integer")
        if self.dims not in (2, 3):
            raise ValueError("dims must be 2 or 3")

    @property
    def points_per_axis(self):
        return self.oversample * (2 * self.n_max + 2)

    L = points_per_axis

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dims

    @property
    def size(self):
        return self.points_per_axis**self.dims

    def positions(self, rows):
        """Unsigned per-axis positions (j mod L) of the given rows, shape (dims, len)."""
        return np.array(np.unravel_index(np.asarray(rows), self.shape))

    def signed_indices(self, rows):
        pos = self.positions(rows)
        L = self.points_per_axis
        return np.where(pos >= L // 2, pos - L, pos)

    def rows_of(self, *indices):
        """Row numbers for (signed or unsigned) per-axis indices."""
        L = self.points_per_axis
        return np.ravel_multi_index(tuple(np.asarray(i) % L for i in indices), self.shape)

    def angles(self, rows=None):
        """(alpha, beta, gamma) of rows; alpha is identically zero in 2D."""
        if rows is None:
            rows = np.arange(self.size)
        idx = self.signed_indices(rows) * (2 * np.pi / self.points_per_axis)
        if self.dims == 2:
            return np.zeros(idx.shape[1]), idx[0], idx[1]
        return idx[0], idx[1], idx[2]


def build_grid(n_max, oversample=1, dims=3):
    return SampleGrid(int(n_max), int(oversample), int(dims))


@dataclass(frozen=True)
class PhysicalMap:
    """Equivalence classes of torus rows that are the same physical pose."""

    grid: SampleGrid
    class_of: np.ndarray         # class id per row
    partner: np.ndarray          # image of each row under the non-polar pairing
    representative: np.ndarray   # one row per class, with beta in [0, pi]

    @property
    def n_classes(self):
        return len(self.representative)

    @cached_property
    def class_sizes(self):
        return np.bincount(self.class_of, minlength=self.n_classes)

    @cached_property
    def polar(self):
        """Boolean per class: True for classes on beta = 0 or beta = pi."""
        beta_pos = self.grid.positions(self.representative)[0 if self.grid.dims == 2 else 1]
        L = self.grid.points_per_axis
        return (beta_pos == 0) | (beta_pos == L // 2)

    def members(self, cls):
        return np.flatnonzero(self.class_of == cls)


def physical_map(grid):
    """Identify torus rows that sample the same point of SO(3) or the sphere.

    Non-polar rows pair as (a, b, g) ~ (a + pi, -b, g - pi). At beta = 0 rows
    with equal alpha + gamma coincide; at beta = pi rows with equal
    alpha + pi - gamma coincide. In 2D only (beta, gamma) is kept, so the
    pairing is (b, g) ~ (-b, g - pi) and each pole is a single class.
    """
    L = grid.points_per_axis
    if L % 2:
        raise ValueError("physical identification needs an even grid")
    h = L // 2
    rows = np.arange(grid.size)
    pos = grid.positions(rows)
    if grid.dims == 3:
        j, k, l = pos
        partner = grid.rows_of(j + h, -k, l - h)
        north, south = k == 0, k == h
        key = np.minimum(rows, partner)
        # pole keys live above the row range so they cannot collide
        key = np.where(north, grid.size + (j + l) % L, key)
        key = np.where(south, grid.size + L + (j - l) % L, key)
    else:
        k, l = pos
        partner = grid.rows_of(-k, l - h)
        north, south = k == 0, k == h
        key = np.minimum(rows, partner)
        key = np.where(north, grid.size, key)
        key = np.where(south, grid.size + 1, key)
    _, first, class_of = np.unique(key, return_index=True, return_inverse=True)
    # representative with beta in [0, pi]: the member whose beta position is <= L/2
    beta_pos = pos[1] if grid.dims == 3 else pos[0]
    rep = first.copy()
    flip = beta_pos[first] > h
    rep[flip] = partner[first[flip]]
    return PhysicalMap(grid, class_of.astype(np.int64), partner.astype(np.int64), rep)


@dataclass(frozen=True)
class SampleSelection:
    grid: SampleGrid
    rows: np.ndarray             # sorted selected row numbers
    classes: np.ndarray          # physical class id of each selected row
    seed: object = None

    @property
    def m_rows(self):
        return len(self.rows)

    @property
    def m_phys(self):
        return len(np.unique(self.classes))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def select_rows(grid, m_rows, seed=None, pmap=None):
    """Uniformly random subset of ``m_rows`` torus rows (without replacement).

    ``seed`` may be an int, a SeedSequence or a Generator. Physical counts are
    derived from ``pmap`` (built on demand).
    """
    m_rows = int(m_rows)
    if not 1 <= m_rows <= grid.size:
        raise ValueError(f"m_rows must lie in [1, {grid.size}], got {m_rows}")
    if pmap is None:
        pmap = physical_map(grid)
    rows = np.sort(_rng(seed).choice(grid.size, size=m_rows, replace=False))
    seed_tag = None if isinstance(seed, np.random.Generator) else seed
    return SampleSelection(grid, rows, pmap.class_of[rows], seed_tag)


def selection_from_rows(grid, rows, pmap=None, seed=None):
    if pmap is None:
        pmap = physical_map(grid)
    rows = np.sort(np.asarray(rows, dtype=np.int64))
    if len(np.unique(rows)) != len(rows) or rows.min() < 0 or rows.max() >= grid.size:
        raise ValueError("rows must be distinct grid rows")
    return SampleSelection(grid, rows, pmap.class_of[rows], seed)
