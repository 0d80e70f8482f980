"""Recover a unit input vector from its sparse activation code.

The active rows of the code pin down an overdetermined linear system; the
inactive rows contribute half-space constraints (their pre-bias similarity
must not exceed the bias). The unit-norm constraint makes the problem
nonconvex, so it is attacked with sequential convex programming: each outer
pass solves a convex subproblem in which the sphere is relaxed to the unit
ball plus a half-space that keeps the iterate close to the previous one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .qp import solve_qp
from .validation import as_matrix

# Outer loop stops when the iterate moves less than this (L2).
_STEP_TOL = 1e-4


@dataclass
class ScpSettings:
    trust_cosine: float = 0.99   # lower bound on cosine to the previous iterate
    max_outer: int = 4
    qp_tol: float = 1e-6
    qp_max_iter: int = 5000

    def validate(self):
        if not 0.0 < self.trust_cosine < 1.0:
            raise InvalidInputError(
                f"trust_cosine must be in (0, 1), got {self.trust_cosine}")
        if self.max_outer < 1:
            raise InvalidInputError(f"max_outer must be >= 1, got {self.max_outer}")


@dataclass
class Reconstruction:
    """Result of one reconstruction: the unit estimate plus diagnostics."""

    x_hat: np.ndarray
    status: str                       # converged | max-outer | infeasible-subproblem | empty-support
    n_outer: int
    objectives: list = field(default_factory=list)   # residual ||A x - v||^2 per iterate


def _normalize(x: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(x)
    if norm < 1e-12:
        out = np.zeros_like(x)
        out[0] = 1.0
        return out
    return x / norm


def reconstruct(code, centers, bias, settings: ScpSettings | None = None) -> Reconstruction:
    """Estimate the unit vector that produced ``code`` under (centers, bias).

    The initial point solves the problem without the norm constraint and is
    then normalized; each outer pass solves the ball-relaxed subproblem with
    the trust half-space anchored at the previous iterate. An infeasible
    first subproblem (the normalized initializer can contradict the inactive
    constraints) is reported via status and the initializer is returned.
    """
    settings = settings or ScpSettings()
    settings.validate()
    C = as_matrix(centers, "centers")
    a = np.asarray(code, dtype=np.float64)
    b = np.asarray(bias, dtype=np.float64)
    if a.shape[0] != C.shape[0] or b.shape[0] != C.shape[0]:
        raise InvalidInputError(
            f"code/bias of length {a.shape[0]}/{b.shape[0]} do not match "
            f"{C.shape[0]} centers")
    active = a > 0.0
    A = C[active]
    v = a[active] + b[active]
    G0 = C[~active]
    h0 = b[~active]

    if A.shape[0] == 0:
        # Nothing to fit; return a feasible direction pointing away from the
        # centers, which satisfies typical inactive constraints.
        x = _normalize(-C.sum(axis=0))
        res = solve_qp(np.zeros((C.shape[1],) * 2), np.zeros(C.shape[1]),
                       G=G0, h=h0, ball_radius=1.0, x0=x,
                       tol=settings.qp_tol, max_iter=settings.qp_max_iter)
        return Reconstruction(_normalize(res.x), "empty-support", 0, [])

    P = 2.0 * A.T @ A
    q = -2.0 * A.T @ v

    def objective(x):
        r = A @ x - v
        return float(r @ r)

    init = solve_qp(P, q, G=G0 if G0.shape[0] else None,
                    h=h0 if G0.shape[0] else None, ball_radius=None,
                    tol=settings.qp_tol, max_iter=settings.qp_max_iter)
    x_prev = _normalize(init.x)
    objectives = [objective(x_prev)]

    status = "max-outer"
    n_outer = 0
    for t in range(settings.max_outer):
        direction = _normalize(x_prev)
        G = np.vstack([G0, -direction[None, :]]) if G0.shape[0] else -direction[None, :]
        h = np.concatenate([h0, [-settings.trust_cosine]]) if G0.shape[0] \
            else np.array([-settings.trust_cosine])
        res = solve_qp(P, q, G=G, h=h, ball_radius=1.0, x0=x_prev,
                       tol=settings.qp_tol, max_iter=settings.qp_max_iter)
        if res.status == "infeasible":
            if t == 0:
                return Reconstruction(x_prev, "infeasible-subproblem", 0, objectives)
            status = "infeasible-subproblem"
            break
        n_outer = t + 1
        x_new = res.x
        objectives.append(objective(x_new))
        step = float(np.linalg.norm(x_new - x_prev))
        x_prev = x_new
        if step < _STEP_TOL:
            status = "converged"
            break
    return Reconstruction(_normalize(x_prev), status, n_outer, objectives)


def reconstruct_rows(codes, centers, bias, settings: ScpSettings | None = None):
    """Reconstruction for each row of a code matrix; returns (X_hat, results)."""
    codes = np.asarray(codes, dtype=np.float64)
    results = [reconstruct(codes[i], centers, bias, settings)
               for i in range(codes.shape[0])]
    x_hat = np.vstack([r.x_hat for r in results])
    return x_hat, results
