"""Compressive sensing of band-limited Wigner D and spherical harmonic series
sampled on equiangular grids.

The series is rewritten as a multi-dimensional Fourier series on the torus,
recovered from a random subset of grid samples by l1 minimisation, and mapped
back to Wigner coefficients block by block.
"""
__version__ = "0.1.0"

from .wigner import (InvalidIndexError, ConsistencyError, wigner_d, wigner_D, delta_matrix, delta_stack,
                     wigner_d_fourier_synthesis, spherical_hankel1, spherical_hankel1_orders)
from .transform import (BandLimit, WignerCoefficients, FourierCoefficients, SubspaceTransform,
                        build_subspace_transform, a_to_b, b_to_a, sparsity_report, wigner_series)
from .grid import SampleGrid, PhysicalMap, SampleSelection, build_grid, physical_map, select_rows
from .operator import DftOperator, MeasurementSet, simulate, noise_std_from_db, field_peak
from .solver import SolverConfig, SolverResult, MatrixOperator, solve_qcbp
from .fields import (SpeakerModel, ProbeResponse, PRESETS, random_sparse_coefficients, speaker_analog,
                     probe_response, compose, rotate_coefficients, preset)
from .recovery import RecoveryReport, recover_field, classical_inversion, normalized_error, snr_db
from .io import load_sh_coefficients, read_coefficients, write_coefficients

__all__ = [
    "InvalidIndexError",
    "ConsistencyError",
    "wigner_d",
    "wigner_D",
    "delta_matrix",
    "delta_stack",
    "wigner_d_fourier_synthesis",
    "spherical_hankel1",
    "spherical_hankel1_orders",
    "BandLimit",
    "WignerCoefficients",
    "FourierCoefficients",
    "SubspaceTransform",
    "build_subspace_transform",
    "a_to_b",
    "b_to_a",
    "sparsity_report",
    "wigner_series",
    "SampleGrid",
    "PhysicalMap",
    "SampleSelection",
    "build_grid",
    "physical_map",
    "select_rows",
    "DftOperator",
    "MeasurementSet",
    "simulate",
    "noise_std_from_db",
    "field_peak",
    "SolverConfig",
    "SolverResult",
    "MatrixOperator",
    "solve_qcbp",
    "SpeakerModel",
    "ProbeResponse",
    "PRESETS",
    "random_sparse_coefficients",
    "speaker_analog",
    "probe_response",
    "compose",
    "rotate_coefficients",
    "preset",
    "RecoveryReport",
    "recover_field",
    "classical_inversion",
    "normalized_error",
    "snr_db",
    "load_sh_coefficients",
    "read_coefficients",
    "write_coefficients",
]
