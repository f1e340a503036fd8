"""Pure-NumPy kernels for the Augustin-Csiszar minimization.

Semantics mirror the compiled extension in `_ac.pyx`; the compiled module is
preferred at import when available. Shapes: p is (nx,), W is (nx, ny) with
row x the channel p(y|x), R is (ny, nx) with row y a distribution over x.
"""

from __future__ import annotations

import numpy as np

_MIN_STEP = 1e-18


def ac_objective(p, W, R, s, coef) -> float:
    """coef * sum_x p(x) log sum_y W(x,y) R(y,x)^s; +inf when infeasible."""
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    R = np.asarray(R, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        terms = np.where(W > 0, W * (R.T**s), 0.0)
        S = terms.sum(axis=1)
        if not np.all(np.isfinite(S)) or np.any(S <= 0):
            return float("inf")
        return float(coef * np.dot(p, np.log(S)))


def _normalize_rows(R, floor):
    R = np.clip(R, floor, None)
    return R / R.sum(axis=1, keepdims=True)


def ac_eg_minimize(p, W, R0, s, coef, step0, tol, max_iters, floor):
    """Exponentiated-gradient descent on the per-output simplices.

    Backtracks (halves the step) on non-decrease; stops when the objective
    improvement drops to tol or no decrease is possible. Returns
    (value, R, iterations, converged).
    """
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    R = _normalize_rows(np.array(R0, dtype=float), floor)
    J = ac_objective(p, W, R, s, coef)
    step = step0
    iters = 0
    converged = False
    for _ in range(max_iters):
        iters += 1
        S = (W * (R.T**s)).sum(axis=1)
        G = -(p[None, :] * W.T) * R ** (s - 1.0) / S[None, :]
        accepted = False
        while step >= _MIN_STEP:
            Z = np.log(R) - step * G
            Z -= Z.max(axis=1, keepdims=True)
            Rc = np.exp(Z)
            Rc /= Rc.sum(axis=1, keepdims=True)
            Rc = _normalize_rows(Rc, floor)
            Jc = ac_objective(p, W, Rc, s, coef)
            if Jc < J:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        delta = J - Jc
        R, J = Rc, Jc
        if delta <= tol:
            converged = True
            break
    return J, R, iters, converged


def ac_grid_scan(p, W, s, coef, ugrid, vgrid):
    """Exhaustive scan of the 2x2 objective over r(0|y0)=u, r(0|y1)=v.

    Returns (best value, index into ugrid, index into vgrid); infeasible
    grid points (zero or non-finite inner sums) are skipped.
    """
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    u = np.asarray(ugrid, dtype=float)
    v = np.asarray(vgrid, dtype=float)

    def term(w, arr):
        if w <= 0:
            return np.zeros_like(arr)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return w * arr**s

    t00, t01 = term(W[0, 0], u), term(W[0, 1], v)
    t10, t11 = term(W[1, 0], 1.0 - u), term(W[1, 1], 1.0 - v)
    S0 = t00[:, None] + t01[None, :]
    S1 = t10[:, None] + t11[None, :]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        J = coef * (p[0] * np.log(S0) + p[1] * np.log(S1))
    J = np.where(np.isfinite(J) & (S0 > 0) & (S1 > 0), J, np.inf)
    flat = int(np.argmin(J))
    i, j = divmod(flat, v.size)
    return float(J[i, j]), i, j
