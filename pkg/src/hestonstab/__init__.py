"""Stability analysis of central finite-difference Heston discretizations.

Builds the semi-discrete operator blocks on a truncated price/variance grid,
computes spectral and logarithmic norms and matrix exponentials, verifies
the advection and diffusion stability bounds together with the full
contractivity certificate chain, and runs the norm-growth parameter sweep.
"""

from .experiments import (
    SweepConfig,
    SweepRecord,
    compare_L_effect,
    loglog_slope,
    max_norm_over_t,
    run_sweep,
)
from .grid import GridSpec, HestonParams, make_grid, scaling_diagonal, scaling_matrices
from .linalg import (
    NormReport,
    expm,
    lambda_max_hermitian,
    log_norm_2,
    log_norm_D,
    log_norm_inf,
    norm_expm,
    spectral_norm,
)
from .operators import (
    OperatorSet,
    StencilSet,
    TransformedOperators,
    build_operators,
    build_stencils,
    commutator_check,
    dump_matrix,
    forward_shift,
    pair_average,
    transformed_operators,
    tridiag,
)
from .stability import (
    BoundCheck,
    CertificateRow,
    DEFAULT_Y_SAMPLES,
    certificate_case_large_y,
    certificate_case_small_y,
    check_advection_bounds,
    check_block_toeplitz_symbol_bound,
    check_diffusion_contractivity,
    check_exp_bound,
    check_symbol_conditions,
    cubic_value,
    diffusion_block_reduction,
    format_certificate_report,
    quartic_value,
    symbol_matrix,
    symbol_matrix_hat,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "CertificateRow",
    "DEFAULT_Y_SAMPLES",
    "GridSpec",
    "HestonParams",
    "NormReport",
    "OperatorSet",
    "StencilSet",
    "SweepConfig",
    "SweepRecord",
    "TransformedOperators",
    "build_operators",
    "build_stencils",
    "certificate_case_large_y",
    "certificate_case_small_y",
    "check_advection_bounds",
    "check_block_toeplitz_symbol_bound",
    "check_diffusion_contractivity",
    "check_exp_bound",
    "check_symbol_conditions",
    "commutator_check",
    "compare_L_effect",
    "cubic_value",
    "diffusion_block_reduction",
    "dump_matrix",
    "expm",
    "format_certificate_report",
    "forward_shift",
    "lambda_max_hermitian",
    "log_norm_2",
    "log_norm_D",
    "log_norm_inf",
    "loglog_slope",
    "make_grid",
    "max_norm_over_t",
    "norm_expm",
    "pair_average",
    "quartic_value",
    "run_sweep",
    "scaling_diagonal",
    "scaling_matrices",
    "spectral_norm",
    "symbol_matrix",
    "symbol_matrix_hat",
    "transformed_operators",
    "tridiag",
]
