"""Off-diagonal decay of matrices under inversion.

A library and CLI for measuring off-diagonal decay in matrix algebra norms
and for experimentally verifying that decay classes (weighted,
Hölder-Zygmund, approximation-space) are preserved by matrix inversion.
"""

from .core import (
    DecayMatrix,
    IndexGeometry,
    adjoint,
    band_truncate,
    bandwidth,
    diagonal_support,
    identity,
    invert,
    multiply,
    restrict_to_window,
    side_diagonal,
    zeros,
)
from .norms import (
    ConvDom,
    Jaffard,
    NormTag,
    OperatorL2,
    Schur,
    SideDiagonalProfile,
    Weight,
    Weighted,
    convdom_norm,
    diagonal_profile,
    is_solid,
    jaffard_norm,
    matrix_norm,
    operator_norm,
    schur_norm,
    weighted_norm,
)
from .smoothness import (
    HZParams,
    TGrid,
    commutator_derivation,
    continuity_defect,
    derivation_power,
    derived_norm,
    finite_difference,
    fourier_coefficient,
    hz_norm,
    hz_seminorm,
    modulate,
    modulus_of_smoothness,
)
from .approximation import (
    ApproxProfile,
    JacksonLadder,
    approx_error,
    approx_profile,
    approx_space_norm,
    fejer_mean,
    jackson_profile,
    lp_block_norm,
    vdp_mean,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    FitResult,
    GeneratorSpec,
    fit_decay_exponent,
    generate,
    laurent_inverse_oracle,
    run_experiment,
)
from .io import parse_norm_tag, read_matrix_json, write_matrix_json

__version__ = "0.1.0"

__all__ = [
    "ApproxProfile",
    "ConvDom",
    "DecayMatrix",
    "ExperimentConfig",
    "ExperimentReport",
    "FitResult",
    "GeneratorSpec",
    "HZParams",
    "IndexGeometry",
    "Jaffard",
    "JacksonLadder",
    "NormTag",
    "OperatorL2",
    "Schur",
    "SideDiagonalProfile",
    "TGrid",
    "Weight",
    "Weighted",
    "adjoint",
    "approx_error",
    "approx_profile",
    "approx_space_norm",
    "band_truncate",
    "bandwidth",
    "commutator_derivation",
    "continuity_defect",
    "convdom_norm",
    "derivation_power",
    "derived_norm",
    "diagonal_profile",
    "diagonal_support",
    "fejer_mean",
    "finite_difference",
    "fit_decay_exponent",
    "fourier_coefficient",
    "generate",
    "hz_norm",
    "hz_seminorm",
    "identity",
    "invert",
    "is_solid",
    "jackson_profile",
    "jaffard_norm",
    "laurent_inverse_oracle",
    "lp_block_norm",
    "matrix_norm",
    "modulate",
    "modulus_of_smoothness",
    "multiply",
    "operator_norm",
    "parse_norm_tag",
    "read_matrix_json",
    "restrict_to_window",
    "run_experiment",
    "schur_norm",
    "side_diagonal",
    "vdp_mean",
    "weighted_norm",
    "write_matrix_json",
    "zeros",
]
