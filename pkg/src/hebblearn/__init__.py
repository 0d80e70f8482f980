"""Competitive Hebbian feature learning and its evaluation toolkit."""

from .exceptions import ConfigError, DataFormatError, HebbLearnError, InvalidInputError
from .hebbian import (
    AdaptiveHebbianLearner,
    FitHistory,
    LearnerConfig,
    LearnerState,
    SparseCode,
    activate,
    fit,
    hebbian_update,
    maybe_add_neuron,
    normalized_correlation,
    prune,
    top_winners,
    update_bias,
    update_correlation,
)
from .metrics import (
    CodeMatrix,
    binary_quantize,
    calibrate_bias,
    empirical_entropy,
    nearest_center_error,
    reconstruction_error,
    weight_correlations,
)
from .qp import QpResult, solve_qp
from .reconstruction import Reconstruction, ScpSettings, reconstruct, reconstruct_rows
from .spherical_kmeans import SphericalKMeans, SpkmModel, assign, spkm_fit
from .vmf import (
    VmfComponent,
    log_bessel_i,
    log_normalizer,
    mean_resultant_length,
    random_unit_vectors,
    sample_mixture,
    sample_vmf,
    vmf_logpdf,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveHebbianLearner",
    "CodeMatrix",
    "ConfigError",
    "DataFormatError",
    "FitHistory",
    "HebbLearnError",
    "InvalidInputError",
    "LearnerConfig",
    "LearnerState",
    "QpResult",
    "Reconstruction",
    "ScpSettings",
    "SparseCode",
    "SphericalKMeans",
    "SpkmModel",
    "VmfComponent",
    "activate",
    "assign",
    "binary_quantize",
    "calibrate_bias",
    "empirical_entropy",
    "fit",
    "hebbian_update",
    "log_bessel_i",
    "log_normalizer",
    "maybe_add_neuron",
    "mean_resultant_length",
    "nearest_center_error",
    "normalized_correlation",
    "prune",
    "random_unit_vectors",
    "reconstruct",
    "reconstruct_rows",
    "reconstruction_error",
    "sample_mixture",
    "sample_vmf",
    "solve_qp",
    "spkm_fit",
    "top_winners",
    "update_bias",
    "update_correlation",
    "vmf_logpdf",
    "weight_correlations",
    "__version__",
]
