"""Subordinacy-based spectral analysis for five-diagonal unitary operators.

The operators are the canonical matrix form of orthogonal-polynomial
recurrences on the unit circle, parameterized by a sequence of reflection
coefficients in the open unit disk. The package computes truncations and
their spectral measures, solution tracks of the eigenvalue recursion,
half-line and whole-line Carathéodory functions, scale-normalized solution
norms, and a conservative spectral classification over boundary angles.
"""

from ._kernels import COMPILED as kernels_compiled
from .coeffs import (
    CoefficientSource,
    Constant,
    Explicit,
    QuasiPeriodic,
    RandomIID,
    Reflected,
    Verblunsky,
    coefficient,
    reflect,
    source_from_dict,
)
from .operator import (
    DiagnosticError,
    SpectralMeasureSample,
    TruncatedOperator,
    build_extended,
    build_half_line_plus,
    dump_matrix,
    lm_factorize,
    spectral_measure,
    theta_block,
)
from .recursion import (
    SingularCoefficientError,
    SolutionTrack,
    Transfer2x2,
    gz_matrix,
    gz_track,
    omega_track,
    polynomials,
    szego_matrix,
    szego_track_values,
    transfer_log_norms,
    transfer_product,
)
from .mfun import (
    CaratheodoryValue,
    RadialTrace,
    caratheodory_value,
    f_minus,
    f_plus,
    f_whole,
    f_whole_oracle,
    m00,
    m_minus,
    m_minus_to_f_minus,
    matched_window,
    radial_scan,
    rotate_omega,
    rotate_omega_inverse,
)
from .subnorm import (
    JLScale,
    NeedsExtensionError,
    ScaleUnboundedError,
    SubordinacyVerdict,
    detect_subordinate,
    jl_scale,
    local_norm,
    subordinacy_ratio,
)
from .classify import (
    ClassifyParams,
    ConjugacyReport,
    EllipticityReport,
    GrowthReport,
    SpectralClassification,
    UnsupportedConfigurationError,
    bounded_transfer_check,
    classify_grid,
    classify_point,
    ellipticity_check,
    verify_conjugacy,
)

__version__ = "0.1.0"

__all__ = [
    "kernels_compiled",
    "CoefficientSource", "Constant", "Explicit", "QuasiPeriodic", "RandomIID",
    "Reflected", "Verblunsky", "coefficient", "reflect", "source_from_dict",
    "DiagnosticError", "SpectralMeasureSample", "TruncatedOperator",
    "build_extended", "build_half_line_plus", "dump_matrix", "lm_factorize",
    "spectral_measure", "theta_block",
    "SingularCoefficientError", "SolutionTrack", "Transfer2x2", "gz_matrix",
    "gz_track", "omega_track", "polynomials", "szego_matrix",
    "szego_track_values", "transfer_log_norms", "transfer_product",
    "CaratheodoryValue", "RadialTrace", "caratheodory_value", "f_minus",
    "f_plus", "f_whole", "f_whole_oracle", "m00", "m_minus",
    "m_minus_to_f_minus", "matched_window", "radial_scan", "rotate_omega",
    "rotate_omega_inverse",
    "JLScale", "NeedsExtensionError", "ScaleUnboundedError",
    "SubordinacyVerdict", "detect_subordinate", "jl_scale", "local_norm",
    "subordinacy_ratio",
    "ClassifyParams", "ConjugacyReport", "EllipticityReport", "GrowthReport",
    "SpectralClassification", "UnsupportedConfigurationError",
    "bounded_transfer_check", "classify_grid", "classify_point",
    "ellipticity_check", "verify_conjugacy",
]
