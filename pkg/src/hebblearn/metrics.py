"""Diagnostics for sparse activation codes: entropy, correlations, errors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError
from .validation import as_matrix, check_unit_rows


@dataclass
class CodeMatrix:
    """Activation codes of a dataset together with the generating model."""

    codes: np.ndarray      # (N, K), nonnegative
    centers: np.ndarray    # (K, d), unit rows
    bias: np.ndarray       # (K,)

    @classmethod
    def encode(cls, centers, bias, x_rows) -> "CodeMatrix":
        centers = as_matrix(centers, "centers")
        X = as_matrix(x_rows, "x_rows")
        bias = np.asarray(bias, dtype=np.float64)
        codes = np.maximum(0.0, X @ centers.T - bias)
        return cls(codes=codes, centers=centers, bias=bias)


def calibrate_bias(centers, x_rows, target_rate: float) -> np.ndarray:
    """Per-neuron bias such that the empirical firing rate matches target_rate.

    A neuron fires on x when center . x > bias, so the bias is placed at the
    appropriate order statistic of the similarity distribution; the achieved
    rate is exact up to ties and rounding (within 1/N).
    """
    centers = as_matrix(centers, "centers")
    X = as_matrix(x_rows, "x_rows")
    if X.shape[0] == 0:
        raise InvalidInputError("calibrate_bias needs at least one sample")
    if not 0.0 <= target_rate <= 1.0:
        raise InvalidInputError(f"target_rate must be in [0, 1], got {target_rate}")
    n = X.shape[0]
    sims = np.sort(X @ centers.T, axis=0)       # (N, K), ascending per neuron
    m = int(round(target_rate * n))
    if m <= 0:
        return sims[-1].copy()
    if m >= n:
        low = sims[0]
        return low - 1e-9 * np.maximum(1.0, np.abs(low))
    return sims[n - m - 1].copy()


def binary_quantize(code) -> np.ndarray:
    """Boolean firing pattern: bit k set iff activation k is strictly positive."""
    arr = np.asarray(code, dtype=np.float64)
    return arr > 0.0


def empirical_entropy(bit_patterns) -> float:
    """Plug-in Shannon entropy (bits) of the observed codeword distribution."""
    bits = np.asarray(bit_patterns, dtype=bool)
    if bits.ndim != 2:
        raise InvalidInputError(f"bit_patterns must be 2-D, got shape {bits.shape}")
    n = bits.shape[0]
    if n == 0:
        raise InvalidInputError("empirical_entropy needs at least one pattern")
    if bits.shape[1] == 0:
        return 0.0
    packed = np.packbits(bits, axis=1)
    _, counts = np.unique(packed, axis=0, return_counts=True)
    p = counts / n
    return float(-(p * np.log2(p)).sum())


def weight_correlations(centers) -> np.ndarray:
    """All pairwise dot products of the unit rows, sorted ascending."""
    C = as_matrix(centers, "centers")
    check_unit_rows(C)
    k = C.shape[0]
    if k < 2:
        return np.empty(0)
    gram = C @ C.T
    iu = np.triu_indices(k, k=1)
    return np.sort(gram[iu])


def reconstruction_error(x, x_hat) -> float:
    """1 - x . x_hat for unit vectors; 0 when identical, 2 when antipodal."""
    x = np.asarray(x, dtype=np.float64)
    x_hat = np.asarray(x_hat, dtype=np.float64)
    return float(1.0 - x @ x_hat)


def nearest_center_error(x, centers) -> float:
    """1 - max cosine between x and any center (squared chord distance / 2)."""
    C = as_matrix(centers, "centers")
    x = np.asarray(x, dtype=np.float64)
    return float(1.0 - np.max(C @ x))
