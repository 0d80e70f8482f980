"""Small dense convex QP solver for affine half-spaces plus one L2 ball.

Minimizes 0.5 x'Px + q'x subject to Gx <= h and optionally ||x|| <= radius,
with P symmetric positive semidefinite. The constraint sets encountered here
are tiny (tens of rows, tens of dimensions), so the solver favors robustness:

1. a projected-gradient feasibility phase certifies that the constraints are
   satisfiable and produces a feasible-ish starting point,
2. ADMM iterations bring the iterate close to the optimum,
3. an active-set refinement solves the equality-constrained KKT system (with
   a 1-D search on the ball multiplier when the ball is tight) to push the
   KKT residuals to machine-level accuracy.

No external solver is used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError

_FEAS_TOL = 1e-8
_ACTIVE_TOL = 1e-7
_DUAL_TOL = 1e-9


@dataclass
class QpResult:
    x: np.ndarray
    status: str                   # "optimal", "max-iterations" or "infeasible"
    stationarity: float
    primal_residual: float
    complementarity: float
    lam: np.ndarray               # multipliers of the half-space constraints
    sigma: float                  # multiplier of the ball constraint x'x <= r^2
    iterations: int

    @property
    def kkt_residual(self) -> float:
        return max(self.stationarity, self.primal_residual, self.complementarity)


def _as_constraints(G, h, dim):
    if G is None:
        return np.zeros((0, dim)), np.zeros(0)
    G = np.atleast_2d(np.asarray(G, dtype=np.float64))
    h = np.atleast_1d(np.asarray(h, dtype=np.float64))
    if G.shape[1] != dim or G.shape[0] != h.shape[0]:
        raise InvalidInputError(
            f"constraint shapes {G.shape} / {h.shape} do not match dimension {dim}")
    return G, h


def _ball_project(x: np.ndarray, radius: float | None) -> np.ndarray:
    if radius is None:
        return x
    norm = np.linalg.norm(x)
    if norm <= radius:
        return x
    return x * (radius / norm)


def _feasible_point(G, h, radius, x0, max_iter=2000):
    """FISTA on the squared constraint violation; returns (x, max violation)."""
    x = _ball_project(x0.copy(), radius)
    if G.shape[0] == 0:
        return x, 0.0
    lip = np.linalg.norm(G, 2) ** 2
    if lip == 0.0:
        viol = float(np.max(np.maximum(0.0, -h), initial=0.0))
        return x, viol
    y = x.copy()
    t = 1.0
    for _ in range(max_iter):
        res = np.maximum(0.0, G @ y - h)
        if not res.any():
            x = y
            break
        grad = G.T @ res
        x_new = _ball_project(y - grad / lip, radius)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        t, x = t_new, x_new
    viol = float(np.max(np.maximum(0.0, G @ x - h), initial=0.0))
    if radius is not None:
        viol = max(viol, float(np.linalg.norm(x)) - radius)
    return x, viol


def _solve_sym(M, rhs):
    try:
        sol = np.linalg.solve(M, rhs)
        if np.all(np.isfinite(sol)):
            return sol
    except np.linalg.LinAlgError:
        pass
    return np.linalg.lstsq(M, rhs, rcond=None)[0]


def _kkt_solve(P, q, G_act, h_act, sigma):
    """Equality-constrained stationary point for a fixed ball multiplier."""
    d = P.shape[0]
    m = G_act.shape[0]
    H = P + 2.0 * sigma * np.eye(d)
    if m == 0:
        return _solve_sym(H, -q), np.zeros(0)
    M = np.zeros((d + m, d + m))
    M[:d, :d] = H
    M[:d, d:] = G_act.T
    M[d:, :d] = G_act
    rhs = np.concatenate([-q, h_act])
    sol = _solve_sym(M, rhs)
    return sol[:d], sol[d:]


def _kkt_solve_ball(P, q, G_act, h_act, radius):
    """Active ball: find sigma >= 0 with ||x(sigma)|| = radius (bisection)."""
    x0, lam0 = _kkt_solve(P, q, G_act, h_act, 0.0)
    if np.linalg.norm(x0) <= radius * (1.0 + 1e-12):
        return x0, lam0, 0.0, False
    lo, hi = 0.0, 1.0
    for _ in range(80):
        x_hi, _ = _kkt_solve(P, q, G_act, h_act, hi)
        if np.linalg.norm(x_hi) <= radius:
            break
        lo = hi
        hi *= 4.0
    else:
        return x0, lam0, 0.0, False
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        x_mid, lam_mid = _kkt_solve(P, q, G_act, h_act, mid)
        if np.linalg.norm(x_mid) > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * (1.0 + hi):
            break
    x, lam = _kkt_solve(P, q, G_act, h_act, hi)
    return x, lam, hi, True


def _residuals(P, q, G, h, radius, x, lam, sigma):
    grad = P @ x + q + 2.0 * sigma * x
    if G.shape[0]:
        grad = grad + G.T @ lam
    stationarity = float(np.max(np.abs(grad)))
    slack = G @ x - h if G.shape[0] else np.zeros(0)
    primal = float(np.max(slack, initial=0.0))
    comp = float(np.max(np.abs(lam * slack), initial=0.0))
    if radius is not None:
        ball_slack = float(x @ x - radius * radius)
        primal = max(primal, ball_slack)
        comp = max(comp, abs(sigma * ball_slack))
    return stationarity, max(primal, 0.0), comp


def _polish(P, q, G, h, radius, x_start, tol):
    """Active-set refinement starting from the constraint pattern at x_start."""
    m = G.shape[0]
    act = set(np.flatnonzero(G @ x_start - h >= -_ACTIVE_TOL)) if m else set()
    ball_act = radius is not None and np.linalg.norm(x_start) >= radius - _ACTIVE_TOL
    seen = set()
    best = None
    for _ in range(80):
        key = (frozenset(act), ball_act)
        if key in seen:
            break
        seen.add(key)
        idx = np.array(sorted(act), dtype=int)
        G_act = G[idx] if idx.size else np.zeros((0, P.shape[0]))
        h_act = h[idx] if idx.size else np.zeros(0)
        if ball_act and radius is not None:
            x, lam_act, sigma, still_active = _kkt_solve_ball(P, q, G_act, h_act, radius)
            if not still_active:
                ball_act = False
        else:
            x, lam_act = _kkt_solve(P, q, G_act, h_act, 0.0)
            sigma = 0.0
        if not np.all(np.isfinite(x)):
            break
        lam = np.zeros(m)
        lam[idx] = lam_act
        if lam_act.size and lam_act.min() < -_DUAL_TOL:
            act.discard(int(idx[int(np.argmin(lam_act))]))
            continue
        lam = np.maximum(lam, 0.0)
        slack = G @ x - h if m else np.zeros(0)
        worst = int(np.argmax(slack)) if m else -1
        if m and slack[worst] > _FEAS_TOL and worst not in act:
            act.add(worst)
            continue
        if radius is not None and not ball_act and np.linalg.norm(x) > radius + _FEAS_TOL:
            ball_act = True
            continue
        sta, pri, comp = _residuals(P, q, G, h, radius, x, lam, sigma)
        cand = (max(sta, pri, comp), x, lam, sigma)
        if best is None or cand[0] < best[0]:
            best = cand
        if cand[0] <= tol:
            break
    return best


def solve_qp(P, q, G=None, h=None, ball_radius=None, x0=None,
             tol: float = 1e-6, max_iter: int = 5000) -> QpResult:
    """Solve the half-space (and optional ball) constrained convex QP.

    Returns a QpResult whose status is "infeasible" when the feasibility
    phase certifies an empty constraint set; otherwise the KKT residuals in
    the result tell how accurately the returned point is optimal.
    """
    P = np.asarray(P, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    d = q.shape[0]
    if P.shape != (d, d):
        raise InvalidInputError(f"P must be ({d}, {d}), got {P.shape}")
    if ball_radius is not None and ball_radius <= 0:
        raise InvalidInputError(f"ball_radius must be positive, got {ball_radius}")
    G, h = _as_constraints(G, h, d)
    m = G.shape[0]
    start = np.zeros(d) if x0 is None else np.asarray(x0, dtype=np.float64).copy()

    x_feas, viol = _feasible_point(G, h, ball_radius, start)
    if viol > _FEAS_TOL:
        lam = np.zeros(m)
        sta, pri, comp = _residuals(P, q, G, h, ball_radius, x_feas, lam, 0.0)
        return QpResult(x_feas, "infeasible", sta, pri, comp, lam, 0.0, 0)

    # ADMM with splits z1 = Gx (box below h) and z2 = x (inside the ball).
    rho = 1.0
    x = x_feas.copy()
    z1 = np.minimum(G @ x, h) if m else np.zeros(0)
    u1 = np.zeros(m)
    use_ball = ball_radius is not None
    z2 = _ball_project(x.copy(), ball_radius) if use_ball else None
    u2 = np.zeros(d) if use_ball else None
    eye = np.eye(d)
    iterations = 0
    for it in range(max_iter):
        iterations = it + 1
        M = P + (rho * G.T @ G if m else 0.0) + (rho * eye if use_ball else 0.0)
        rhs = -q
        if m:
            rhs = rhs + rho * G.T @ (z1 - u1)
        if use_ball:
            rhs = rhs + rho * (z2 - u2)
        x = _solve_sym(M, rhs)
        r_norm = 0.0
        s_norm = 0.0
        if m:
            gx = G @ x
            z1_old = z1
            z1 = np.minimum(gx + u1, h)
            u1 = u1 + gx - z1
            r_norm = max(r_norm, float(np.max(np.abs(gx - z1), initial=0.0)))
            s_norm = max(s_norm, rho * float(np.max(np.abs(G.T @ (z1 - z1_old)), initial=0.0)))
        if use_ball:
            z2_old = z2
            z2 = _ball_project(x + u2, ball_radius)
            u2 = u2 + x - z2
            r_norm = max(r_norm, float(np.max(np.abs(x - z2))))
            s_norm = max(s_norm, rho * float(np.max(np.abs(z2 - z2_old))))
        if max(r_norm, s_norm) < 1e-10:
            break
        if (it + 1) % 100 == 0:
            if r_norm > 10.0 * s_norm:
                rho *= 2.0
                u1 /= 2.0
                if use_ball:
                    u2 /= 2.0
            elif s_norm > 10.0 * r_norm:
                rho /= 2.0
                u1 *= 2.0
                if use_ball:
                    u2 *= 2.0

    polished = _polish(P, q, G, h, ball_radius, x, tol)
    if polished is not None:
        kkt, x_p, lam_p, sigma_p = polished
        sta, pri, comp = _residuals(P, q, G, h, ball_radius, x_p, lam_p, sigma_p)
        status = "optimal" if kkt <= tol else "max-iterations"
        return QpResult(x_p, status, sta, pri, comp, lam_p, sigma_p, iterations)

    lam = rho * u1
    sigma = 0.0
    if use_ball:
        norm_x = np.linalg.norm(x)
        if norm_x > 1e-12:
            sigma = rho * float(np.linalg.norm(u2)) / (2.0 * norm_x)
    sta, pri, comp = _residuals(P, q, G, h, ball_radius, x, np.maximum(lam, 0.0), sigma)
    status = "optimal" if max(sta, pri, comp) <= tol else "max-iterations"
    return QpResult(x, status, sta, pri, comp, np.maximum(lam, 0.0), sigma, iterations)
