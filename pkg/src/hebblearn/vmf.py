"""Sampling and density evaluation for von Mises-Fisher mixtures on the unit sphere.

The sampler draws the cosine against the mean direction with Wood's rejection
scheme and completes each sample with a uniform direction in the orthogonal
complement, so every returned row is unit-norm by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError
from .validation import as_rng, as_vector, check_unit_vector

# Switch point between the power series and the large-argument asymptotic
# expansion of log I_nu(x); expressed in terms of the sphere dimension the
# caller works in (x >= max(10, d) with nu = d/2 - 1).
_SERIES_MAX_TERMS = 200_000


@dataclass
class VmfComponent:
    """One von Mises-Fisher mixture component.

    mu is the unit mean direction, kappa >= 0 the concentration (kappa = 0
    degenerates to the uniform distribution on the sphere), n_samples the
    number of draws this component contributes to a mixture.
    """

    mu: np.ndarray
    kappa: float
    n_samples: int

    def __post_init__(self):
        self.mu = as_vector(self.mu, "mu")
        check_unit_vector(self.mu, tol=1e-9, name="mu")
        if self.kappa < 0:
            raise InvalidInputError(f"kappa must be >= 0, got {self.kappa}")
        if self.n_samples < 0:
            raise InvalidInputError(f"n_samples must be >= 0, got {self.n_samples}")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


def _wood_envelope(kappa: float, d: int) -> tuple[float, float, float]:
    b = (-2.0 * kappa + math.sqrt(4.0 * kappa * kappa + (d - 1.0) ** 2)) / (d - 1.0)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + (d - 1.0) * math.log1p(-x0 * x0)
    return b, x0, c


def _sample_cosines(kappa: float, d: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Draw n cosines t against mu by rejection; returns (t, proposal count)."""
    b, x0, c = _wood_envelope(kappa, d)
    alpha = (d - 1.0) / 2.0
    out = np.empty(n)
    filled = 0
    proposals = 0
    while filled < n:
        m = n - filled
        z = rng.beta(alpha, alpha, size=m)
        u = rng.random(m)
        t = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        accept = kappa * t + (d - 1.0) * np.log1p(-x0 * t) - c >= np.log(u)
        n_acc = int(accept.sum())
        out[filled:filled + n_acc] = t[accept]
        filled += n_acc
        proposals += m
    return out, proposals


def _orthogonal_directions(mu: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit directions in the orthogonal complement of mu."""
    d = mu.shape[0]
    g = rng.standard_normal((n, d))
    g -= np.outer(g @ mu, mu)
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        g[bad] -= np.outer(g[bad] @ mu, mu)
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def sample_vmf(component: VmfComponent, rng, return_stats: bool = False):
    """Draw component.n_samples IID unit vectors from the component.

    With return_stats=True also returns {"proposals": ..., "accepted": ...}
    for monitoring the rejection loop's acceptance rate.
    """
    rng = as_rng(rng)
    d = component.dim
    if d < 2:
        raise InvalidInputError(f"vMF sampling requires dimension >= 2, got {d}")
    n = component.n_samples
    if component.kappa == 0.0:
        g = rng.standard_normal((n, d))
        norms = np.linalg.norm(g, axis=1)
        while np.any(norms < 1e-12):
            bad = norms < 1e-12
            g[bad] = rng.standard_normal((int(bad.sum()), d))
            norms = np.linalg.norm(g, axis=1)
        x = g / norms[:, None]
        return (x, {"proposals": n, "accepted": n}) if return_stats else x
    t, proposals = _sample_cosines(component.kappa, d, n, rng)
    v = _orthogonal_directions(component.mu, n, rng)
    x = t[:, None] * component.mu + np.sqrt(np.maximum(0.0, 1.0 - t * t))[:, None] * v
    if return_stats:
        return x, {"proposals": proposals, "accepted": n}
    return x


def sample_mixture(components, rng, shuffle: bool = False):
    """Concatenated samples from all components plus integer component labels.

    With shuffle=True the presentation order is permuted (seeded by rng).
    """
    if not components:
        raise InvalidInputError("mixture needs at least one component")
    rng = as_rng(rng)
    parts = [sample_vmf(c, rng) for c in components]
    labels = np.concatenate([np.full(c.n_samples, i, dtype=np.int64)
                             for i, c in enumerate(components)])
    x = np.vstack(parts)
    if shuffle:
        order = rng.permutation(x.shape[0])
        x, labels = x[order], labels[order]
    return x, labels


def random_unit_vectors(n: int, d: int, rng) -> np.ndarray:
    """Uniform draws on the (d-1)-sphere, used for mixture mean directions."""
    rng = as_rng(rng)
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def _log_bessel_i_series(nu: float, x: float) -> float:
    """Power series of I_nu(x), accumulated in scaled linear space.

    All terms are positive so there is no cancellation; the running sum is
    rescaled into the exponent whenever it grows large.
    """
    half = x / 2.0
    log_scale = nu * math.log(half) - math.lgamma(nu + 1.0)
    cur = 1.0
    total = 1.0
    hh = half * half
    for m in range(_SERIES_MAX_TERMS):
        cur *= hh / ((m + 1.0) * (m + 1.0 + nu))
        total += cur
        if total > 1e280:
            log_scale += math.log(total)
            cur /= total
            total = 1.0
        if cur < 1e-19 * total and (m + 1.0) > half:
            break
    return log_scale + math.log(total)


def _log_bessel_i_asymptotic(nu: float, x: float) -> float | None:
    """Large-argument expansion of log I_nu(x); None when it cannot reach ~1e-13."""
    mu4 = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    best_rel = math.inf
    for k in range(1, 200):
        nxt = term * -(mu4 - (2.0 * k - 1.0) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) and k > 1:
            break
        term = nxt
        total += term
        best_rel = min(best_rel, abs(term) / max(abs(total), 1e-300))
        if best_rel < 1e-17:
            break
    if best_rel > 1e-13 or total <= 0.0:
        return None
    return x - 0.5 * math.log(2.0 * math.pi * x) + math.log(total)


def log_bessel_i(nu: float, x: float) -> float:
    """log I_nu(x) for nu >= 0, x >= 0, evaluated without overflow.

    Uses the power series below the switch point x = max(10, 2 nu + 2) and the
    large-argument asymptotic expansion above it, falling back to the series
    when the asymptotic tail cannot be truncated accurately.
    """
    if x < 0 or nu < 0:
        raise InvalidInputError("log_bessel_i requires nu >= 0 and x >= 0")
    if x == 0.0:
        return 0.0 if nu == 0.0 else -math.inf
    if x >= max(10.0, 2.0 * nu + 2.0):
        val = _log_bessel_i_asymptotic(nu, x)
        if val is not None:
            return val
    return _log_bessel_i_series(nu, x)


def _log_sphere_area(d: int) -> float:
    # Surface area of the unit (d-1)-sphere embedded in R^d.
    return math.log(2.0) + (d / 2.0) * math.log(math.pi) - math.lgamma(d / 2.0)


def log_normalizer(d: int, kappa: float) -> float:
    """log of the vMF density normalization constant in R^d."""
    if kappa == 0.0:
        return -_log_sphere_area(d)
    nu = d / 2.0 - 1.0
    return nu * math.log(kappa) - (d / 2.0) * math.log(2.0 * math.pi) - log_bessel_i(nu, kappa)


def vmf_logpdf(x, component: VmfComponent):
    """Log density of the component at unit vector x (or at each row of x)."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    rows = arr[None, :] if single else arr
    if rows.shape[1] != component.dim:
        raise InvalidInputError(
            f"x has dimension {rows.shape[1]}, component has {component.dim}")
    norms = np.linalg.norm(rows, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise InvalidInputError("vmf_logpdf requires unit-norm inputs")
    logz = log_normalizer(component.dim, component.kappa)
    vals = component.kappa * (rows @ component.mu) + logz
    return float(vals[0]) if single else vals


def mean_resultant_length(d: int, kappa: float) -> float:
    """Expected norm of the sample mean under vMF: I_{d/2}(kappa)/I_{d/2-1}(kappa)."""
    if kappa == 0.0:
        return 0.0
    return math.exp(log_bessel_i(d / 2.0, kappa) - log_bessel_i(d / 2.0 - 1.0, kappa))
