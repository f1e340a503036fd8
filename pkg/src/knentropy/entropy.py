"""Unconditional entropies: Shannon, Renyi, Havrda-Charvat-Tsallis, Sharma-Mittal.

All values are in nats. Order 1 is the limit sentinel: passing an order
within 1e-9 of 1 selects the Shannon limit in closed form instead of the
generic formula (which degrades numerically there).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .means import q_log
from .prob import Dist

LIMIT = 1.0  # sentinel order meaning "take the limit toward 1"
_LIMIT_TOL = 1e-9


def is_limit(order: float) -> bool:
    return abs(order - 1.0) < _LIMIT_TOL


def _check_alpha(alpha: float):
    if not alpha > 0:
        raise ValueError(f"order alpha must be positive, got {alpha}")


@dataclass(frozen=True)
class EntropyParams:
    """Entropy orders; near-1 values clamp to the exact limit sentinel."""

    alpha: float = LIMIT
    beta: float = LIMIT

    def __post_init__(self):
        _check_alpha(self.alpha)
        if is_limit(self.alpha):
            object.__setattr__(self, "alpha", LIMIT)
        if is_limit(self.beta):
            object.__setattr__(self, "beta", LIMIT)

    @property
    def alpha_is_limit(self) -> bool:
        return self.alpha == LIMIT

    @property
    def beta_is_limit(self) -> bool:
        return self.beta == LIMIT


def shannon(p: Dist) -> float:
    """-sum p log p over the support (0 log 0 := 0)."""
    sp = p.probs[p.probs > 0]
    return float(-np.dot(sp, np.log(sp)))


def alpha_norm(p: Dist, alpha: float) -> float:
    """(sum_x p(x)^alpha)^(1/alpha), with 0^alpha := 0."""
    _check_alpha(alpha)
    sp = p.probs[p.probs > 0]
    return float(np.sum(sp**alpha) ** (1.0 / alpha))


def renyi(p: Dist, alpha: float = LIMIT) -> float:
    """Renyi entropy of order alpha; Shannon at the limit sentinel."""
    _check_alpha(alpha)
    if is_limit(alpha):
        return shannon(p)
    sp = p.probs[p.probs > 0]
    return float(np.log(np.sum(sp**alpha)) / (1.0 - alpha))


def hct(p: Dist, alpha: float = LIMIT) -> float:
    """Havrda-Charvat-Tsallis entropy of order alpha; Shannon at the limit."""
    _check_alpha(alpha)
    if is_limit(alpha):
        return shannon(p)
    sp = p.probs[p.probs > 0]
    return float((np.sum(sp**alpha) - 1.0) / (1.0 - alpha))


def sharma_mittal(p: Dist, alpha: float, beta: float) -> float:
    """Sharma-Mittal entropy of order (alpha, beta).

    beta at the limit sentinel reduces to Renyi; beta = alpha reduces to
    Havrda-Charvat-Tsallis; both at the limit give Shannon.
    """
    _check_alpha(alpha)
    if is_limit(beta):
        return renyi(p, alpha)
    if is_limit(alpha):
        # limit of the power sum term is exp((1-beta) H(p))
        return float(np.expm1((1.0 - beta) * shannon(p)) / (1.0 - beta))
    sp = p.probs[p.probs > 0]
    power_sum = float(np.sum(sp**alpha))
    ratio = (1.0 - beta) / (1.0 - alpha)
    return float(np.expm1(ratio * np.log(power_sum)) / (1.0 - beta))


def unified_entropy(p: Dist, which: str, alpha: float, beta: float = LIMIT) -> float:
    """Common alpha-norm/q-log form shared by Renyi, HCT, and Sharma-Mittal.

    Evaluates ln_q(||p||_alpha^(alpha/(1-alpha))) with q = 1, alpha, or beta
    for which in {'renyi', 'hct', 'sm'}. Must agree with the direct formulas.
    """
    _check_alpha(alpha)
    if which not in ("renyi", "hct", "sm"):
        raise ValueError(f"unknown entropy kind {which!r}")
    if is_limit(alpha):
        # the exponent alpha/(1-alpha) diverges; fall back to the limit values
        if which == "renyi" or (which == "sm" and is_limit(beta)):
            return shannon(p)
        if which == "hct":
            return shannon(p)
        return sharma_mittal(p, alpha, beta)
    q = {"renyi": 1.0, "hct": alpha, "sm": beta}[which]
    t = alpha_norm(p, alpha) ** (alpha / (1.0 - alpha))
    return q_log(t, q)
