"""Generic exponentiated-gradient optimization over blocks of simplices.

Used by the vulnerability module for soft 0-1 gains, where the objective is
built from arbitrary monotone-function chains; the Augustin-Csiszar solver
has its own specialized kernels.
"""

from __future__ import annotations

import numpy as np

_MIN_STEP = 1e-18


def eg_minimize(f, grad, R0, step0=0.1, tol=1e-12, max_iters=10_000, floor=1e-12):
    """Minimize f over row-wise simplices by mirror descent with backtracking.

    f(R) -> float and grad(R) -> array take a (k, n) matrix whose rows are
    floor-interior distributions. The step halves on non-decrease and
    recovers (doubles, capped at step0) after accepted steps. Returns
    (value, R, iterations, converged).
    """
    R = np.clip(np.array(R0, dtype=float), floor, None)
    R /= R.sum(axis=1, keepdims=True)
    J = f(R)
    step = step0
    iters = 0
    converged = False
    for _ in range(max_iters):
        iters += 1
        G = grad(R)
        accepted = False
        while step >= _MIN_STEP:
            Z = np.log(R) - step * G
            Z -= Z.max(axis=1, keepdims=True)
            Rc = np.exp(Z)
            Rc /= Rc.sum(axis=1, keepdims=True)
            Rc = np.clip(Rc, floor, None)
            Rc /= Rc.sum(axis=1, keepdims=True)
            Jc = f(Rc)
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
        step = min(step * 2.0, step0)
    return J, R, iters, converged


def eg_multistart(f, grad, inits, sense, step0=0.1, tol=1e-12, max_iters=10_000, floor=1e-12):
    """Run eg_minimize from several inits; sense=+1 maximizes f, -1 minimizes.

    Returns (best value in f units, R, total iterations, converged,
    best init index). Ties break toward the lowest init index.
    """
    if sense > 0:
        fm = lambda R: -f(R)
        gm = lambda R: -grad(R)
    else:
        fm, gm = f, grad
    best = None
    total_iters = 0
    any_converged = False
    for idx, R0 in enumerate(inits):
        val, R, iters, conv = eg_minimize(fm, gm, R0, step0, tol, max_iters, floor)
        total_iters += iters
        any_converged = any_converged or conv
        if best is None or val < best[0]:
            best = (val, R, idx)
    val, R, idx = best
    return (-val if sense > 0 else val), R, total_iters, any_converged, idx
