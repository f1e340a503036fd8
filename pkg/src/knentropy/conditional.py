"""Conditional entropies: Arimoto, Hayashi, Augustin-Csiszar, and the
expected-posterior HCT / Sharma-Mittal forms.

All sums run over outputs with positive marginal mass only; order 1 is the
Shannon limit sentinel as in `entropy`. The Augustin-Csiszar value is a
minimization over reverse conditionals and is solved numerically
(exponentiated gradient or fixed point, multi-start), certified at desk
scale by an exhaustive grid oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .entropy import LIMIT, is_limit
from .means import q_log
from .prob import Dist, Joint

__all__ = [
    "AcSolverConfig",
    "AcSolution",
    "shannon_conditional",
    "arimoto",
    "hayashi",
    "hct_conditional",
    "sharma_mittal_conditional",
    "augustin_csiszar",
    "ac_objective",
    "ac_grid_oracle",
]


def _check_order(alpha: float):
    if not alpha > 0:
        raise ValueError(f"order alpha must be positive, got {alpha}")


def shannon_conditional(j: Joint) -> float:
    """H(X|Y) = sum_y p(y) H(X | Y=y) in nats."""
    post = j.posterior_matrix
    py = j.marginal.probs[j.support]
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(post > 0, post * np.log(post), 0.0)
    return float(-np.dot(py, plogp.sum(axis=0)))


def arimoto(j: Joint, alpha: float = LIMIT) -> float:
    """Arimoto conditional entropy of order alpha."""
    _check_order(alpha)
    if is_limit(alpha):
        return shannon_conditional(j)
    m = j.matrix[:, j.support]
    inner = np.sum(m**alpha, axis=0) ** (1.0 / alpha)
    return float(alpha / (1.0 - alpha) * np.log(inner.sum()))


def hayashi(j: Joint, alpha: float = LIMIT) -> float:
    """Hayashi conditional entropy of order alpha."""
    _check_order(alpha)
    if is_limit(alpha):
        return shannon_conditional(j)
    py = j.marginal.probs[j.support]
    inner = np.sum(j.posterior_matrix**alpha, axis=0)
    return float(np.log(np.dot(py, inner)) / (1.0 - alpha))


def hct_conditional(j: Joint, alpha: float = LIMIT) -> float:
    """Expected posterior HCT entropy: sum_y p(y) S_alpha(p(.|y))."""
    _check_order(alpha)
    if is_limit(alpha):
        return shannon_conditional(j)
    py = j.marginal.probs[j.support]
    inner = (np.sum(j.posterior_matrix**alpha, axis=0) - 1.0) / (1.0 - alpha)
    return float(np.dot(py, inner))


def sharma_mittal_conditional(j: Joint, alpha: float, beta: float) -> float:
    """Sharma-Mittal conditional entropy of order (alpha, beta).

    beta at the limit sentinel reproduces the Hayashi value; alpha at the
    limit gives ln_beta(exp H(X|Y)).
    """
    _check_order(alpha)
    if is_limit(alpha):
        return q_log(float(np.exp(shannon_conditional(j))), beta)
    py = j.marginal.probs[j.support]
    expected = float(np.dot(py, np.sum(j.posterior_matrix**alpha, axis=0)))
    return q_log(expected ** (1.0 / (1.0 - alpha)), beta)


# ---------------------------------------------------------------------------
# Augustin-Csiszar minimization

DETERMINISTIC_CANDIDATE_CAP = 4096


@dataclass(frozen=True)
class AcSolverConfig:
    """Settings for the Augustin-Csiszar solver."""

    method: str = "exp_gradient"  # or "fixed_point"
    restarts: int = 8  # 1 uniform init + (restarts-1) Dirichlet inits
    max_iters: int = 10_000
    step_size: float = 0.1
    tol: float = 1e-12
    floor: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("exp_gradient", "fixed_point"):
            raise ValueError(f"unknown solver method {self.method!r}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.floor <= 1e-6:
            raise ValueError("floor must be in (0, 1e-6]")


@dataclass(frozen=True)
class AcSolution:
    """Result of the minimization over reverse conditionals."""

    value: float
    argmin: np.ndarray  # shape (|support|, |X|): row j is r(.|support[j])
    y_support: np.ndarray
    iterations: int
    converged: bool
    method: str
    best_start: int = 0

    @property
    def argmin_dists(self) -> list[Dist]:
        return [Dist(row) for row in self.argmin]


def _exponents(alpha: float) -> tuple[float, float]:
    return 1.0 - 1.0 / alpha, alpha / (1.0 - alpha)


def _restricted(j: Joint):
    active = j.prior.support
    p = j.prior.probs[active]
    W = j.channel.rows[np.ix_(active, j.support)]
    return active, p, W


def ac_objective(j: Joint, alpha: float, r) -> float:
    """Evaluate the minimization objective at a feasible reverse conditional.

    r has one row per *supported* y (a distribution over X); a full
    |Y|-row matrix is sliced down to the support automatically.
    """
    _check_order(alpha)
    if is_limit(alpha):
        raise ValueError("objective undefined at the order-1 limit")
    r = np.asarray(r, dtype=float)
    if r.shape == (j.n_y, j.n_x) and j.support.size != j.n_y:
        r = r[j.support]
    if r.shape != (j.support.size, j.n_x):
        raise ValueError(f"reverse conditional must be {j.support.size}x{j.n_x}")
    active, p, W = _restricted(j)
    s, coef = _exponents(alpha)
    return float(kernels.ac_objective(p, W, r[:, active], s, coef))


def _fixed_point_minimize(p, W, R0, s, coef, alpha, tol, max_iters, floor):
    """Arimoto-style update r(x|y) <- (p(x) W(x,y)/S_x)^alpha, renormalized."""
    R = np.clip(np.array(R0, dtype=float), floor, None)
    R /= R.sum(axis=1, keepdims=True)
    best_J = kernels.ac_objective(p, W, R, s, coef)
    best_R = R.copy()
    J = best_J
    iters = 0
    converged = False
    for _ in range(max_iters):
        iters += 1
        S = (W * (R.T**s)).sum(axis=1)
        Rn = ((p[None, :] * W.T) / S[None, :]) ** alpha
        Rn = np.clip(Rn, floor, None)
        Rn /= Rn.sum(axis=1, keepdims=True)
        Jn = kernels.ac_objective(p, W, Rn, s, coef)
        if Jn < best_J:
            best_J, best_R = Jn, Rn.copy()
        delta = abs(J - Jn)
        R, J = Rn, Jn
        if delta <= tol:
            converged = True
            break
    return best_J, best_R, iters, converged


def _deterministic_candidates(p, W, s, coef):
    """Objective at every point-mass reverse conditional (if feasible)."""
    ny, nx = W.shape[1], W.shape[0]
    best = None
    for assignment in itertools.product(range(nx), repeat=ny):
        R = np.zeros((ny, nx))
        R[np.arange(ny), assignment] = 1.0
        val = kernels.ac_objective(p, W, R, s, coef)
        if np.isfinite(val) and (best is None or val < best[0]):
            best = (val, R)
    return best


def _snap_blocks(p, W, J, R, s, coef, max_sweeps: int = 3):
    """Greedily replace single per-output rows by their nearest vertex.

    Mixed optima (a boundary row next to interior ones) arise with sparse
    channels and are approached only asymptotically by the gradient
    iteration; snapping a row costs one objective evaluation and is accepted
    only on strict decrease.
    """
    R = np.array(R, dtype=float)
    for _ in range(max_sweeps):
        improved = False
        for y in range(R.shape[0]):
            snapped = R.copy()
            snapped[y] = 0.0
            snapped[y, int(np.argmax(R[y]))] = 1.0
            Js = kernels.ac_objective(p, W, snapped, s, coef)
            if Js < J:
                J, R = Js, snapped
                improved = True
        if not improved:
            break
    return J, R


def augustin_csiszar(j: Joint, alpha: float, cfg: AcSolverConfig | None = None) -> AcSolution:
    """Minimize the order-alpha objective over reverse conditionals r(x|y).

    Multi-start solve (uniform + Dirichlet inits per cfg); when
    |X|^|Y| <= 4096 every deterministic reverse conditional is also
    evaluated and the best one seeds an extra polish run, since optima can
    sit on the simplex boundary for alpha > 1. Deterministic given cfg.seed;
    ties break toward the lowest start index.
    """
    _check_order(alpha)
    if is_limit(alpha):
        raise ValueError("Augustin-Csiszar order must differ from 1; "
                         "use shannon_conditional for the limit")
    cfg = cfg or AcSolverConfig()
    active, p, W = _restricted(j)
    nx, ny = active.size, j.support.size
    s, coef = _exponents(alpha)

    rng = np.random.default_rng(cfg.seed)
    inits = [np.full((ny, nx), 1.0 / nx)]
    for _ in range(cfg.restarts - 1):
        inits.append(rng.dirichlet(np.ones(nx), size=ny))

    det = None
    if nx**ny <= DETERMINISTIC_CANDIDATE_CAP:
        det = _deterministic_candidates(p, W, s, coef)
        if det is not None:
            inits.append(np.clip(det[1], cfg.floor, None))

    runs = []
    for R0 in inits:
        if cfg.method == "exp_gradient":
            runs.append(
                kernels.ac_eg_minimize(
                    p, W, R0, s, coef, cfg.step_size, cfg.tol, cfg.max_iters, cfg.floor
                )
            )
        else:
            runs.append(
                _fixed_point_minimize(
                    p, W, R0, s, coef, alpha, cfg.tol, cfg.max_iters, cfg.floor
                )
            )
    iterative_converged = any(run[3] and np.isfinite(run[0]) for run in runs)
    if det is not None:
        runs.append((det[0], det[1], 0, True))

    values = [run[0] for run in runs]
    best_idx = int(np.argmin(values))
    best_val, best_R, _, _ = runs[best_idx]
    if not np.isfinite(best_val):
        raise ArithmeticError("Augustin-Csiszar solver failed on every start")

    # exact evaluations (deterministic candidates, snapped vertices) are
    # trustworthy on their own; otherwise converged means some iterative
    # start met the tolerance
    exact_final = det is not None and best_idx == len(runs) - 1

    snapped_val, snapped_R = _snap_blocks(p, W, best_val, best_R, s, coef)
    if snapped_val < best_val:
        # re-polish the interior rows around the snapped boundary rows
        polish = (
            kernels.ac_eg_minimize(
                p, W, np.clip(snapped_R, cfg.floor, None), s, coef,
                cfg.step_size, cfg.tol, cfg.max_iters, cfg.floor,
            )
            if cfg.method == "exp_gradient"
            else _fixed_point_minimize(
                p, W, np.clip(snapped_R, cfg.floor, None), s, coef, alpha,
                cfg.tol, cfg.max_iters, cfg.floor,
            )
        )
        options = [
            (best_val, best_R, exact_final, False),
            (snapped_val, snapped_R, True, False),
            (polish[0], polish[1], False, polish[3]),
        ]
        best_val, best_R, exact_final, polish_converged = min(options, key=lambda c: c[0])
        iterative_converged = iterative_converged or polish_converged

    argmin = np.zeros((ny, j.n_x))
    argmin[:, active] = np.asarray(best_R)
    return AcSolution(
        value=float(best_val),
        argmin=argmin,
        y_support=j.support.copy(),
        iterations=int(sum(run[2] for run in runs)),
        converged=bool(iterative_converged or exact_final),
        method=cfg.method,
        best_start=best_idx,
    )


def ac_grid_oracle(
    j: Joint, alpha: float, step: float = 1e-3, refine_step: float = 1e-5
) -> AcSolution:
    """Exhaustive two-simplex grid minimum for 2x2 instances.

    Scans r(0|y0), r(0|y1) over [0,1]^2 at `step`, then rescans a one-cell
    window around the best point at `refine_step`. Independent of the
    gradient solver; used to certify it.
    """
    _check_order(alpha)
    active, p, W = _restricted(j)
    if active.size != 2 or j.support.size != 2:
        raise ValueError("grid oracle supports exactly 2 active inputs and 2 supported outputs")
    s, coef = _exponents(alpha)

    coarse = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    val, i, k = kernels.ac_grid_scan(p, W, s, coef, coarse, coarse)
    u, v = coarse[i], coarse[k]

    def window(center):
        lo, hi = max(0.0, center - step), min(1.0, center + step)
        return np.linspace(lo, hi, int(round((hi - lo) / refine_step)) + 1)

    ug, vg = window(u), window(v)
    val2, i2, k2 = kernels.ac_grid_scan(p, W, s, coef, ug, vg)
    if val2 < val:
        val, u, v = val2, ug[i2], vg[k2]

    best = np.array([[u, 1.0 - u], [v, 1.0 - v]])
    argmin = np.zeros((2, j.n_x))
    argmin[:, active] = best
    return AcSolution(
        value=float(val),
        argmin=argmin,
        y_support=j.support.copy(),
        iterations=0,
        converged=True,
        method="grid",
    )
