"""Boundary indices of gapped magnetic lattice Hamiltonians on half-space windows.

The package computes the relative index of a partitioned boundary region from
the exponential unitary of a smoothed spectral step, compares it with the
windowed boundary current and with bulk Chern numbers, and ships a small
experiment harness around these checks.
"""
from __future__ import annotations

from .current import CurrentReport, boundary_current, current_density, current_operator
from .experiments import SUITES, Scenario, SuiteReport, default_scenarios, run_suite
from .geometry import (AdmissibilityReport, BordismReport, Domain, GeometryError, Partition, Site,
                       ball, bordant, build_domain, check_admissibility, distance_to_boundary,
                       make_partition)
from .index import (AdmissibilityError, ChernData, GaplessError, IndexReport, IndexSystem,
                    bloch_chern, bulk_gap, bulk_gaps, crossing_windows, exp_unitary,
                    find_crossings, localized_relative_index, relative_index_density,
                    spectral_flow, theta_report, total_relative_index)
from .operators import (FluxError, FluxSpec, HermitianOperator, Operator, ProjectionOperator,
                        UnitaryOperator, compress, harper_hamiltonian, hopping_unitary,
                        indicator_projection, magnetic_translation)
from .spectral import (EigenDecomposition, SmoothStep, apply_function, detect_gaps,
                       eigendecompose, gap_filling_ratio, kernel_decay_profile, make_smoothstep)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError", "AdmissibilityReport", "BordismReport", "ChernData", "CurrentReport",
    "Domain", "EigenDecomposition", "FluxError", "FluxSpec", "GaplessError", "GeometryError",
    "HermitianOperator", "IndexReport", "IndexSystem", "Operator", "Partition",
    "ProjectionOperator", "SUITES", "Scenario", "Site", "SmoothStep", "SuiteReport",
    "UnitaryOperator", "apply_function", "ball", "bloch_chern", "bordant", "boundary_current",
    "build_domain", "bulk_gap", "bulk_gaps", "check_admissibility", "compress",
    "crossing_windows", "current_density", "current_operator", "default_scenarios",
    "detect_gaps", "distance_to_boundary", "eigendecompose", "exp_unitary", "find_crossings",
    "gap_filling_ratio", "harper_hamiltonian", "hopping_unitary", "indicator_projection",
    "kernel_decay_profile", "localized_relative_index", "magnetic_translation",
    "make_partition", "make_smoothstep", "relative_index_density", "run_suite",
    "spectral_flow", "theta_report", "total_relative_index",
]
