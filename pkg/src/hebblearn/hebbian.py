"""Online competitive Hebbian learning with adaptive neuron recruitment.

The learner processes one unit-norm sample at a time. Each step rectifies the
biased similarities into a sparse activation code, optionally recruits a new
neuron for poorly covered inputs, applies a soft winner-take-all weight update
with per-dimension synaptic competition, nudges biases toward a target firing
rate, and tracks activity correlations used to prune redundant neurons.

Every mechanism is a standalone function operating on a LearnerState so each
one can be tested (and disabled) in isolation; AdaptiveHebbianLearner wraps
them in a scikit-learn estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import InvalidInputError
from .validation import as_matrix, as_vector, check_range, check_unit_rows, check_unit_vector

NORM_MODES = ("explicit-renormalize", "decay-approximation")

# Smoothing constants of the two moving-average filters and the bias step.
RATE_EMA = 0.01
BIAS_LR = 0.01
CORR_EMA = 1e-4

# Pairs whose smoothed squared activity is below this are skipped when
# normalizing correlations (fresh neurons start at exactly zero).
PRUNE_ENERGY_EPS = 1e-12


@dataclass
class LearnerConfig:
    """Hyperparameters of the learner; see field comments for ranges.

    allow_add / allow_prune / allow_bias switch off individual mechanisms for
    ablation runs. seed is recorded for provenance; the training loop itself
    is deterministic given the sample order.
    """

    eta: float = 1e-2                 # learning rate, > 0
    a_bias: float = 0.2               # target mean firing rate in [0, 1]
    a_t: float = 1.0                  # recruit when total activity is below this
    rho_t: float = 0.6                # ... and max cosine similarity is below this
    rho_u: float = 0.8                # prune pairs with normalized correlation above this
    k_w: int = 1                      # number of winners receiving updates, >= 1
    epochs: int = 15
    prune_period: int = 5000          # samples between prune passes
    competition_factor: float = 0.9   # fraction of the extreme weight needed to update
    norm_mode: str = "explicit-renormalize"
    seed: int = 0
    allow_add: bool = True
    allow_prune: bool = True
    allow_bias: bool = True

    def validate(self) -> None:
        check_range(self.eta, 0.0, None, "eta", lo_open=True)
        check_range(self.a_bias, 0.0, 1.0, "a_bias")
        check_range(self.rho_t, 0.0, 1.0, "rho_t")
        check_range(self.rho_u, 0.0, 1.0, "rho_u")
        check_range(self.competition_factor, 0.0, 1.0, "competition_factor", lo_open=True)
        if not isinstance(self.k_w, int) or self.k_w < 1:
            raise InvalidInputError(f"k_w must be an integer >= 1, got {self.k_w!r}")
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise InvalidInputError(f"epochs must be an integer >= 1, got {self.epochs!r}")
        if not isinstance(self.prune_period, int) or self.prune_period < 1:
            raise InvalidInputError(
                f"prune_period must be an integer >= 1, got {self.prune_period!r}")
        if self.norm_mode not in NORM_MODES:
            raise InvalidInputError(
                f"norm_mode must be one of {NORM_MODES}, got {self.norm_mode!r}")


@dataclass
class SparseCode:
    """Nonnegative activation vector of one sample and its active index set."""

    activation: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.activation > 0.0)


@dataclass
class LearnerState:
    """Mutable model: unit-row weights plus the homeostatic/pruning statistics.

    corr holds the raw coactivity moving average; only entries (j, k) with
    k > j are meaningful (the full symmetric matrix is kept so the update is
    a single rank-one accumulation). bias is unconstrained and may go
    negative, which is how long-silent neurons regain activity.
    """

    weights: np.ndarray          # (k, d), rows unit-norm
    bias: np.ndarray             # (k,)
    rate: np.ndarray             # (k,) smoothed firing indicator in [0, 1]
    corr: np.ndarray             # (k, k) coactivity EMA, upper triangle used
    energy: np.ndarray           # (k,) smoothed squared activation
    samples_seen: int = 0

    @classmethod
    def from_first_sample(cls, x: np.ndarray, a_bias: float) -> "LearnerState":
        x = as_vector(x, "x")
        check_unit_vector(x)
        return cls(
            weights=x[None, :].copy(),
            bias=np.zeros(1),
            rate=np.full(1, a_bias),
            corr=np.zeros((1, 1)),
            energy=np.zeros(1),
        )

    @property
    def n_neurons(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "LearnerState":
        return LearnerState(
            weights=self.weights.copy(),
            bias=self.bias.copy(),
            rate=self.rate.copy(),
            corr=self.corr.copy(),
            energy=self.energy.copy(),
            samples_seen=self.samples_seen,
        )


def _check_sample(state: LearnerState, x) -> np.ndarray:
    x = as_vector(x, "x")
    if x.shape[0] != state.dim:
        raise InvalidInputError(
            f"sample has dimension {x.shape[0]}, model expects {state.dim}")
    return x


def _activate(state: LearnerState, x: np.ndarray) -> SparseCode:
    a = state.weights @ x - state.bias
    np.maximum(a, 0.0, out=a)
    return SparseCode(a)


def activate(state: LearnerState, x) -> SparseCode:
    """Rectified biased similarity of x against every neuron; pure function."""
    x = _check_sample(state, x)
    check_unit_vector(x)
    return _activate(state, x)


def maybe_add_neuron(state: LearnerState, x, code: SparseCode, config: LearnerConfig) -> bool:
    """Recruit x as a new neuron when it is both poorly explained and far away.

    The two gates are the total activity of the current code and the maximum
    raw (pre-bias, pre-rectification) similarity. Returns whether a neuron
    was appended; the state is modified in place.
    """
    x = _check_sample(state, x)
    if float(code.activation.sum()) >= config.a_t:
        return False
    if float(np.max(state.weights @ x)) >= config.rho_t:
        return False
    k = state.n_neurons
    state.weights = np.vstack([state.weights, x[None, :]])
    state.bias = np.append(state.bias, 0.0)
    state.rate = np.append(state.rate, config.a_bias)
    state.energy = np.append(state.energy, 0.0)
    corr = np.zeros((k + 1, k + 1))
    corr[:k, :k] = state.corr
    state.corr = corr
    return True


def top_winners(code: SparseCode, k_w: int) -> np.ndarray:
    """Indices of the k_w largest activations, ties broken by lowest index."""
    k = code.activation.shape[0]
    if k_w >= k:
        return np.arange(k)
    if k_w == 1:
        return np.array([int(np.argmax(code.activation))])
    return np.argsort(-code.activation, kind="stable")[:k_w]


def _competition_mask(rows: np.ndarray, x: np.ndarray, factor: float) -> np.ndarray:
    """Which (winner, dimension) entries receive the Hebbian increment.

    For positive input dimensions a winner's weight must be within ``factor``
    of the largest winner weight at that dimension (analogously via the
    minimum for negative inputs). The extreme weight itself always qualifies,
    which keeps the rule meaningful when the extreme is negative and makes a
    single winner receive the full unrestricted update.
    """
    col_max = rows.max(axis=0)
    col_min = rows.min(axis=0)
    pos = x > 0.0
    neg = x < 0.0
    mask_pos = pos & ((rows >= factor * col_max) | (rows == col_max))
    mask_neg = neg & ((rows <= factor * col_min) | (rows == col_min))
    return mask_pos | mask_neg


def hebbian_update(state: LearnerState, x, code: SparseCode, config: LearnerConfig) -> LearnerState:
    """Soft winner-take-all update with per-dimension synaptic competition.

    Winner rows are renormalized according to config.norm_mode: either an
    explicit division by the row norm or a first-order decay correction that
    approximates it without the division.
    """
    x = _check_sample(state, x)
    winners = top_winners(code, config.k_w)
    w = state.weights
    rows = w[winners]
    mask = _competition_mask(rows, x, config.competition_factor)
    if config.norm_mode == "explicit-renormalize":
        delta = np.where(mask, config.eta * x, 0.0)
        for i, k in enumerate(winners):
            row = w[k] + delta[i]
            w[k] = row / np.linalg.norm(row)
    else:
        masked = np.where(mask, x, 0.0)
        for i, k in enumerate(winners):
            row = w[k]
            w[k] = row + config.eta * masked[i] - config.eta * float(row @ masked[i]) * row
    return state


def update_bias(state: LearnerState, code: SparseCode, config: LearnerConfig) -> LearnerState:
    """Move each neuron's smoothed firing rate and bias toward the target rate.

    Skipped entirely (rate and bias both frozen) when allow_bias is off.
    """
    if not config.allow_bias:
        return state
    fired = np.sign(code.activation)
    state.rate *= 1.0 - RATE_EMA
    state.rate += RATE_EMA * fired
    state.bias += BIAS_LR * (state.rate - config.a_bias)
    return state


def update_correlation(state: LearnerState, code: SparseCode) -> LearnerState:
    """Exponential moving averages of pairwise coactivity and squared activity."""
    a = code.activation
    state.corr *= 1.0 - CORR_EMA
    state.corr += CORR_EMA * np.outer(a, a)
    state.energy *= 1.0 - CORR_EMA
    state.energy += CORR_EMA * a * a
    return state


def normalized_correlation(state: LearnerState) -> np.ndarray:
    """Snapshot C(j,k)/sqrt(e_j e_k) for j < k; -inf where undefined or j >= k."""
    k = state.n_neurons
    cn = np.full((k, k), -np.inf)
    valid = state.energy > PRUNE_ENERGY_EPS
    scale = np.sqrt(state.energy, where=valid, out=np.ones_like(state.energy))
    pair_ok = np.outer(valid, valid)
    iu = np.triu_indices(k, k=1)
    upper_ok = pair_ok[iu]
    cn[iu[0][upper_ok], iu[1][upper_ok]] = (
        state.corr[iu[0][upper_ok], iu[1][upper_ok]]
        / (scale[iu[0][upper_ok]] * scale[iu[1][upper_ok]])
    )
    return cn


def prune(state: LearnerState, config: LearnerConfig) -> list[int]:
    """Greedily remove the higher-indexed neuron of each over-correlated pair.

    Works on a snapshot of the normalized correlations: after each removal the
    argmax is recomputed among survivors, until no pair exceeds rho_u.
    Returns the removed indices (positions before the pass) in removal order.
    """
    k = state.n_neurons
    if k < 2:
        return []
    cn = normalized_correlation(state)
    removed: list[int] = []
    while True:
        flat = int(np.argmax(cn))
        j, kk = divmod(flat, k)
        if not cn[j, kk] > config.rho_u:
            break
        removed.append(kk)
        cn[kk, :] = -np.inf
        cn[:, kk] = -np.inf
    if removed:
        state.weights = np.delete(state.weights, removed, axis=0)
        state.bias = np.delete(state.bias, removed)
        state.rate = np.delete(state.rate, removed)
        state.energy = np.delete(state.energy, removed)
        state.corr = np.delete(np.delete(state.corr, removed, axis=0), removed, axis=1)
    return removed


def fit(x_rows, config: LearnerConfig, epoch_callback=None) -> LearnerState:
    """Train on the rows of x_rows in presentation order for config.epochs.

    The state is initialized from the first row. Within each step: activate,
    optionally recruit (re-activating so the fresh neuron can win), update
    weights, bias, and correlations, and prune on the sample-count schedule.
    epoch_callback(epoch_index, state) is invoked after each epoch.
    """
    X = as_matrix(x_rows, "x_rows")
    if X.shape[0] == 0:
        raise InvalidInputError("x_rows must contain at least one sample")
    check_unit_rows(X)
    config.validate()
    state = LearnerState.from_first_sample(X[0], config.a_bias)
    n = X.shape[0]
    for epoch in range(config.epochs):
        for i in range(n):
            x = X[i]
            code = _activate(state, x)
            if config.allow_add and maybe_add_neuron(state, x, code, config):
                code = _activate(state, x)
            hebbian_update(state, x, code, config)
            update_bias(state, code, config)
            update_correlation(state, code)
            state.samples_seen += 1
            if config.allow_prune and state.samples_seen % config.prune_period == 0:
                prune(state, config)
        if epoch_callback is not None:
            epoch_callback(epoch, state)
    return state


@dataclass
class FitHistory:
    """Per-epoch diagnostics collected during AdaptiveHebbianLearner.fit."""

    neuron_counts: list = field(default_factory=list)
    weight_changes: list = field(default_factory=list)   # Frobenius norm over shared rows


class AdaptiveHebbianLearner(BaseEstimator, TransformerMixin):
    """Scikit-learn wrapper around the online competitive Hebbian learner.

    fit expects unit-norm rows; transform returns the sparse activation codes
    under the trained weights and biases, predict the index of the most
    active neuron.
    """

    def __init__(self, eta=1e-2, a_bias=0.2, a_t=1.0, rho_t=0.6, rho_u=0.8,
                 k_w=1, epochs=15, prune_period=5000, competition_factor=0.9,
                 norm_mode="explicit-renormalize", allow_add=True,
                 allow_prune=True, allow_bias=True, seed=0):
        self.eta = eta
        self.a_bias = a_bias
        self.a_t = a_t
        self.rho_t = rho_t
        self.rho_u = rho_u
        self.k_w = k_w
        self.epochs = epochs
        self.prune_period = prune_period
        self.competition_factor = competition_factor
        self.norm_mode = norm_mode
        self.allow_add = allow_add
        self.allow_prune = allow_prune
        self.allow_bias = allow_bias
        self.seed = seed

    def _config(self) -> LearnerConfig:
        return LearnerConfig(
            eta=self.eta, a_bias=self.a_bias, a_t=self.a_t, rho_t=self.rho_t,
            rho_u=self.rho_u, k_w=self.k_w, epochs=self.epochs,
            prune_period=self.prune_period,
            competition_factor=self.competition_factor,
            norm_mode=self.norm_mode, seed=self.seed,
            allow_add=self.allow_add, allow_prune=self.allow_prune,
            allow_bias=self.allow_bias,
        )

    def fit(self, X, y=None):
        config = self._config()
        history = FitHistory()
        tracker = {"prev": None}

        def record(epoch, state):
            history.neuron_counts.append(state.n_neurons)
            prev = tracker["prev"]
            if prev is None:
                history.weight_changes.append(float("nan"))
            else:
                m = min(prev.shape[0], state.n_neurons)
                history.weight_changes.append(
                    float(np.linalg.norm(state.weights[:m] - prev[:m])))
            tracker["prev"] = state.weights.copy()

        state = fit(X, config, epoch_callback=record)
        self.state_ = state
        self.config_ = config
        self.history_ = history
        self.weights_ = state.weights
        self.bias_ = state.bias
        self.n_neurons_ = state.n_neurons
        return self

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise NotFittedError("AdaptiveHebbianLearner is not fitted yet")

    def transform(self, X):
        self._check_fitted()
        X = as_matrix(X, "X")
        check_unit_rows(X)
        if X.shape[1] != self.state_.dim:
            raise InvalidInputError(
                f"X has dimension {X.shape[1]}, model expects {self.state_.dim}")
        return np.maximum(0.0, X @ self.state_.weights.T - self.state_.bias)

    def predict(self, X):
        return np.argmax(self.transform(X), axis=1)


def wta_config(eta: float, epochs: int = 1) -> LearnerConfig:
    """Pure winner-take-all ablation: one winner, no recruitment/prune/bias."""
    return LearnerConfig(eta=eta, k_w=1, epochs=epochs, allow_add=False,
                         allow_prune=False, allow_bias=False)
