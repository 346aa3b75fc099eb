"""Wigner d functions, their Fourier tables, and the sparsity they induce.

Run with ``python demos/01_wigner_tables.py``. Prints text only.
"""
import numpy as np

from sphcs import (a_to_b, delta_matrix, preset, random_sparse_coefficients, sparsity_report, wigner_d,
                   wigner_d_fourier_synthesis)

# A single small-d value two ways: the direct sum and the finite Fourier series
# built from the exact Delta table.
n, mu, m, beta = 4, 1, -2, 0.7
print(f"d^{n}_{mu},{m}({beta}) direct  = {wigner_d(n, mu, m, beta):+.15f}")
print(f"d^{n}_{mu},{m}({beta}) fourier = {wigner_d_fourier_synthesis(n, mu, m, beta):+.15f}")

# Delta tables are exact rationals under square roots; print the n=1 table.
print("\nDelta(1):")
print(np.array2string(np.asarray(delta_matrix(1), dtype=float), precision=6, suppress_small=True))

# Every Wigner coefficient spreads over at most 2n+1 beta-frequencies, so a
# set of s_D coefficients becomes at most (2 n_max + 1) s_D Fourier ones.
a = random_sparse_coefficients(15, 20, seed=1, random_phase=True)
rep = sparsity_report(a)
print(f"\nrandom 20-sparse SH-type series: s_D={rep.s_D}  s_F={rep.s_F}  "
      f"bound={rep.worst_case_bound}")
b = a_to_b(a)
mag = np.sort(np.abs(b.values.ravel()))[::-1]
print("largest Fourier magnitudes:", np.array2string(mag[:6], precision=4))

# The speaker/probe presets are far from sparse in either domain, which is
# worth knowing before expecting miracles from l1 recovery.
for name in ("C1a", "C2b", "C3c"):
    r = sparsity_report(preset(name)[2])
    print(f"{name}: s_D={r.s_D:4d}  s_F={r.s_F:5d}  distinct (m, mu) pairs={r.n_mmu}")
