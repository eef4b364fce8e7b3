"""Degenerate-diffusion boundary-flux toolkit.

Solves d_t w = d_x(|x - a|^theta d_x w) + (alpha + i beta) w on (0, 1)
with Dirichlet boundaries by an exact Bessel series, evaluates the
boundary-flux observables, quantifies their sensitivity to the interior
degeneracy point a, and reconstructs a (and initial data) from flux
records by box-constrained least squares.
"""

from .bessel import ZeroTable, bessel_j, bessel_j_prime, bessel_zeros, gamma
from .forward import (
    FluxSample,
    Measurement,
    ProblemConfig,
    flux,
    flux_profile,
    measure,
    read_measurement_csv,
    rotation,
    solve_profile,
    solve_state,
    time_grid,
    write_measurement_csv,
)
from .inverse import (
    AdmissibleBox,
    ObjectiveSpec,
    ReconstructionResult,
    noise_study,
    objective_eval,
    reconstruct,
)
from .quadrature import (
    InitialData,
    QuadratureRule,
    gauss_legendre,
    modal_coefficient_derivatives,
    modal_coefficients,
)
from .spectral import DegeneracyExponent, SpectralBasis, build_basis, eigenfunction
from .stability import (
    LipschitzData,
    ScanResult,
    flux_sensitivity,
    scan_flag,
    scan_summary,
    stability_scan,
    waiting_time_bound,
    write_scan_csv,
    write_scan_summary,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibleBox",
    "DegeneracyExponent",
    "FluxSample",
    "InitialData",
    "LipschitzData",
    "Measurement",
    "ObjectiveSpec",
    "ProblemConfig",
    "QuadratureRule",
    "ReconstructionResult",
    "ScanResult",
    "SpectralBasis",
    "ZeroTable",
    "bessel_j",
    "bessel_j_prime",
    "bessel_zeros",
    "build_basis",
    "eigenfunction",
    "flux",
    "flux_profile",
    "flux_sensitivity",
    "gamma",
    "gauss_legendre",
    "measure",
    "modal_coefficient_derivatives",
    "modal_coefficients",
    "noise_study",
    "objective_eval",
    "read_measurement_csv",
    "reconstruct",
    "rotation",
    "scan_flag",
    "scan_summary",
    "solve_profile",
    "solve_state",
    "stability_scan",
    "time_grid",
    "waiting_time_bound",
    "write_measurement_csv",
    "write_scan_csv",
    "write_scan_summary",
    "__version__",
]
