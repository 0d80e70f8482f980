"""Batch spherical K-means: cosine-similarity Lloyd iterations on unit vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.exceptions import NotFittedError

from .exceptions import InvalidInputError
from .validation import as_matrix, check_unit_rows

_CENTER_NORM_GUARD = 1e-12


@dataclass
class SpkmModel:
    """Unit-norm cluster centers and the mean max-cosine objective they achieve.

    The number of rows can be lower than requested: clusters that end up
    empty during training are removed.
    """

    centers: np.ndarray
    inertia: float


def _assign(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sims = X @ centers.T
    labels = np.argmax(sims, axis=1)          # ties -> lowest index
    best = sims[np.arange(X.shape[0]), labels]
    return labels, best


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int):
    """One restart; returns (centers, labels, per-assignment objective history)."""
    history = []
    prev_labels = None
    for _ in range(max_iter):
        labels, best = _assign(X, centers)
        history.append(float(best.mean()))
        if prev_labels is not None and labels.shape == prev_labels.shape \
                and np.array_equal(labels, prev_labels):
            break
        new_centers = []
        dropped = False
        for c in range(centers.shape[0]):
            members = X[labels == c]
            if members.shape[0] == 0:
                dropped = True
                continue
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm < _CENTER_NORM_GUARD:
                dropped = True
                continue
            new_centers.append(mean / norm)
        centers = np.vstack(new_centers)
        prev_labels = None if dropped else labels
    labels, best = _assign(X, centers)
    return centers, labels, history


def spkm_fit(x_rows, k_requested: int, restarts: int = 5, seed: int = 0,
             max_iter: int = 300) -> SpkmModel:
    """Best of ``restarts`` Lloyd runs, each initialized with random data rows.

    Runs alternate assignment (max cosine) and center recomputation
    (normalized member mean, empty clusters removed) until the assignment is
    stable or max_iter is hit. The winner is the restart with the highest
    mean max-cosine objective; ties keep the earliest restart.
    """
    X = as_matrix(x_rows, "x_rows")
    check_unit_rows(X)
    n = X.shape[0]
    if not 1 <= k_requested <= n:
        raise InvalidInputError(
            f"k_requested must be in [1, {n}] for {n} samples, got {k_requested}")
    if restarts < 1:
        raise InvalidInputError(f"restarts must be >= 1, got {restarts}")
    best: SpkmModel | None = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        init = X[rng.choice(n, size=k_requested, replace=False)]
        centers, _, history = _lloyd(X, init, max_iter)
        objective = history[-1]
        if best is None or objective > best.inertia:
            best = SpkmModel(centers=centers, inertia=objective)
    return best


def assign(x, model: SpkmModel) -> int:
    """Index of the center with the highest cosine to x; ties -> lowest index."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.centers.shape[1],):
        raise InvalidInputError(
            f"x must have shape ({model.centers.shape[1]},), got {x.shape}")
    return int(np.argmax(model.centers @ x))


class SphericalKMeans(BaseEstimator, ClusterMixin):
    """Scikit-learn front end for spkm_fit.

    After fit, cluster_centers_ holds the (possibly reduced) unit-norm
    centers, labels_ the training assignment, inertia_ the mean max-cosine.
    """

    def __init__(self, n_clusters=8, restarts=5, max_iter=300, seed=0):
        self.n_clusters = n_clusters
        self.restarts = restarts
        self.max_iter = max_iter
        self.seed = seed

    def fit(self, X, y=None):
        model = spkm_fit(X, self.n_clusters, restarts=self.restarts,
                         seed=self.seed, max_iter=self.max_iter)
        self.model_ = model
        self.cluster_centers_ = model.centers
        self.inertia_ = model.inertia
        self.labels_, _ = _assign(as_matrix(X), model.centers)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("SphericalKMeans is not fitted yet")

    def predict(self, X):
        self._check_fitted()
        X = as_matrix(X, "X")
        labels, _ = _assign(X, self.cluster_centers_)
        return labels

    def transform(self, X):
        """Cosine similarity of each row to each center."""
        self._check_fitted()
        return as_matrix(X, "X") @ self.cluster_centers_.T
