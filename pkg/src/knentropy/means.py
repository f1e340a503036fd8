"""Strictly monotone function families and the Kolmogorov-Nagumo (quasi-arithmetic) mean.

Every function carries its domain interval, its direction, a closed-form
inverse, and a derivative, so that optimizers and framework transforms can
compose and invert them without any symbolic machinery. Out-of-domain
arguments raise DomainError eagerly instead of producing silent NaNs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .prob import Dist

Q_LIMIT_TOL = 1e-9


class DomainError(ValueError):
    """A value fell outside a monotone function's domain."""


def q_log(t, q: float):
    """q-logarithm of t > 0: natural log at q=1, else (t^(1-q) - 1)/(1-q)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("q_log requires strictly positive arguments")
    if abs(q - 1.0) < Q_LIMIT_TOL:
        out = np.log(arr)
    else:
        out = np.expm1((1.0 - q) * np.log(arr)) / (1.0 - q)
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def q_exp(u, q: float):
    """Inverse of the q-logarithm: exp at q=1, else (1 + (1-q)u)^(1/(1-q))."""
    arr = np.asarray(u, dtype=float)
    if abs(q - 1.0) < Q_LIMIT_TOL:
        out = np.exp(arr)
    else:
        base = 1.0 + (1.0 - q) * arr
        if np.any(base <= 0):
            raise DomainError("q_exp argument outside the range of q_log")
        out = np.exp(np.log(base) / (1.0 - q))
    return float(out) if np.isscalar(u) or arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# intervals

@dataclass(frozen=True)
class Interval:
    """Real interval with open/closed endpoints; endpoints may be +-inf."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True

    def contains(self, values) -> bool:
        v = np.asarray(values, dtype=float)
        ok_lo = v > self.lo if self.lo_open else v >= self.lo
        ok_hi = v < self.hi if self.hi_open else v <= self.hi
        return bool(np.all(ok_lo & ok_hi))

    def require(self, values, what: str):
        if not self.contains(values):
            raise DomainError(f"{what}: values outside domain {self}")

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


REALS = Interval()
POSITIVE = Interval(lo=0.0)


# ---------------------------------------------------------------------------
# monotone function variants

class MonotoneFn:
    """Strictly monotone continuous function with closed-form inverse."""

    domain: Interval = REALS

    def apply(self, t):
        self.domain.require(t, self.text())
        return self._apply(np.asarray(t, dtype=float))

    def __call__(self, t):
        out = self.apply(t)
        return float(out) if np.ndim(out) == 0 else out

    def inverse(self, u):
        """Apply the inverse function to u (checked against the range)."""
        self.range.require(u, f"{self.text()} inverse")
        out = self.inverse_fn()._apply(np.asarray(u, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t):
        self.domain.require(t, f"{self.text()} derivative")
        out = self._derivative(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    @property
    def range(self) -> Interval:
        return self._image(self.domain)

    def _image(self, iv: Interval) -> Interval:
        """Image of a sub-interval of the domain (monotone: map endpoints)."""
        a = self._extended(iv.lo)
        b = self._extended(iv.hi)
        lo_open, hi_open = iv.lo_open, iv.hi_open
        if self.direction < 0:
            a, b = b, a
            lo_open, hi_open = hi_open, lo_open
        return Interval(a, b, lo_open or math.isinf(a), hi_open or math.isinf(b))

    def _preimage(self, iv: Interval) -> Interval:
        target = iv.intersect(self.range)
        if target.empty:
            return target
        return self.inverse_fn()._image(target)

    # subclass hooks -------------------------------------------------------
    direction: int = 1  # +1 increasing, -1 decreasing

    def _apply(self, t: np.ndarray):
        raise NotImplementedError

    def _derivative(self, t: np.ndarray):
        raise NotImplementedError

    def _extended(self, t: float) -> float:
        """Limit value at a domain endpoint (handles +-inf and open ends)."""
        raise NotImplementedError

    def inverse_fn(self) -> "MonotoneFn":
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.text()

    def __eq__(self, other) -> bool:
        return isinstance(other, MonotoneFn) and self.text() == other.text()

    def __hash__(self) -> int:
        return hash(self.text())


@dataclass(frozen=True, eq=False)
class Affine(MonotoneFn):
    a: float
    b: float = 0.0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("affine slope must be non-zero")

    domain = REALS

    @property
    def direction(self) -> int:
        return 1 if self.a > 0 else -1

    def _apply(self, t):
        return self.a * t + self.b

    def _derivative(self, t):
        return np.full_like(t, self.a)

    def _extended(self, t):
        if math.isinf(t):
            return t if self.a > 0 else -t
        return self.a * t + self.b

    def inverse_fn(self):
        return Affine(1.0 / self.a, -self.b / self.a)

    def text(self):
        return f"affine({self.a!r},{self.b!r})"


class Log(MonotoneFn):
    domain = POSITIVE
    direction = 1

    def _apply(self, t):
        return np.log(t)

    def _derivative(self, t):
        return 1.0 / t

    def _extended(self, t):
        if t <= 0:
            return -math.inf
        return math.inf if math.isinf(t) else math.log(t)

    def inverse_fn(self):
        return Exp()

    def text(self):
        return "log"


class Exp(MonotoneFn):
    domain = REALS
    direction = 1

    def _apply(self, t):
        return np.exp(t)

    def _derivative(self, t):
        return np.exp(t)

    def _extended(self, t):
        if t == -math.inf:
            return 0.0
        return math.inf if t == math.inf else math.exp(t)

    def inverse_fn(self):
        return Log()

    def text(self):
        return "exp"


@dataclass(frozen=True, eq=False)
class QLog(MonotoneFn):
    """q-logarithm as a function object; equals Log when |q-1| < 1e-9."""

    q: float

    domain = POSITIVE
    direction = 1

    @property
    def _is_log(self) -> bool:
        return abs(self.q - 1.0) < Q_LIMIT_TOL

    def _apply(self, t):
        if self._is_log:
            return np.log(t)
        return np.expm1((1.0 - self.q) * np.log(t)) / (1.0 - self.q)

    def _derivative(self, t):
        return t ** (-self.q)

    def _extended(self, t):
        if self._is_log:
            return Log()._extended(t)
        if t <= 0:
            return -1.0 / (1.0 - self.q) if self.q < 1 else -math.inf
        if math.isinf(t):
            return math.inf if self.q < 1 else 1.0 / (self.q - 1.0)
        return q_log(t, self.q)

    def inverse_fn(self):
        return QExp(self.q)

    def text(self):
        return f"qlog({self.q!r})"


@dataclass(frozen=True, eq=False)
class QExp(MonotoneFn):
    """Inverse of the q-logarithm."""

    q: float

    direction = 1

    @property
    def domain(self) -> Interval:
        return QLog(self.q).range

    def _apply(self, u):
        if abs(self.q - 1.0) < Q_LIMIT_TOL:
            return np.exp(u)
        return np.exp(np.log1p((1.0 - self.q) * u) / (1.0 - self.q))

    def _derivative(self, u):
        if abs(self.q - 1.0) < Q_LIMIT_TOL:
            return np.exp(u)
        return self._apply(u) ** self.q

    def _extended(self, u):
        dom = self.domain
        if u <= dom.lo:
            return 0.0
        if u >= dom.hi:
            return math.inf
        return q_exp(u, self.q)

    def inverse_fn(self):
        return QLog(self.q)

    def text(self):
        return f"qexp({self.q!r})"


@dataclass(frozen=True, eq=False)
class Power(MonotoneFn):
    r: float

    def __post_init__(self):
        if self.r == 0:
            raise ValueError("power exponent must be non-zero")

    domain = POSITIVE

    @property
    def direction(self) -> int:
        return 1 if self.r > 0 else -1

    def _apply(self, t):
        return t ** self.r

    def _derivative(self, t):
        return self.r * t ** (self.r - 1.0)

    def _extended(self, t):
        if t <= 0:
            return 0.0 if self.r > 0 else math.inf
        if math.isinf(t):
            return math.inf if self.r > 0 else 0.0
        return t ** self.r

    def inverse_fn(self):
        return Power(1.0 / self.r)

    def text(self):
        return f"power({self.r!r})"


class Negate(MonotoneFn):
    domain = REALS
    direction = -1

    def _apply(self, t):
        return -t

    def _derivative(self, t):
        return np.full_like(t, -1.0)

    def _extended(self, t):
        return -t

    def inverse_fn(self):
        return Negate()

    def text(self):
        return "negate"


class Compose(MonotoneFn):
    """outer o inner; direction is the product of the parts' directions."""

    def __init__(self, outer: MonotoneFn, inner: MonotoneFn):
        self.outer = outer
        self.inner = inner
        dom = inner._preimage(outer.domain)
        if dom.empty:
            raise DomainError(
                f"composition {outer.text()} o {inner.text()} has empty domain"
            )
        self.domain = dom

    @property
    def direction(self) -> int:
        return self.outer.direction * self.inner.direction

    def _apply(self, t):
        return self.outer._apply(self.inner._apply(t))

    def _derivative(self, t):
        mid = self.inner._apply(t)
        return self.outer._derivative(mid) * self.inner._derivative(t)

    def _extended(self, t):
        return self.outer._extended(self.inner._extended(t))

    def inverse_fn(self):
        return Compose(self.inner.inverse_fn(), self.outer.inverse_fn())

    def text(self):
        return f"compose({self.outer.text()},{self.inner.text()})"


def identity_fn() -> MonotoneFn:
    return Affine(1.0, 0.0)


def compose(*fns: MonotoneFn) -> MonotoneFn:
    """compose(f, g, h) = f o g o h."""
    if not fns:
        raise ValueError("compose needs at least one function")
    out = fns[-1]
    for f in reversed(fns[:-1]):
        out = Compose(f, out)
    return out


# ---------------------------------------------------------------------------
# text syntax: affine(1,0) | log | exp | qlog(q) | qexp(q) | power(r)
#              | negate | compose(f,g,...)

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|[(),]|[-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot tokenize function spec at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def number(self) -> float:
        return float(self.take())

    def fn(self) -> MonotoneFn:
        name = self.take().lower()
        if name == "log":
            return Log()
        if name == "exp":
            return Exp()
        if name == "negate":
            return Negate()
        self.take("(")
        if name == "affine":
            a = self.number()
            self.take(",")
            b = self.number()
            self.take(")")
            return Affine(a, b)
        if name in ("qlog", "qexp", "power"):
            v = self.number()
            self.take(")")
            return {"qlog": QLog, "qexp": QExp, "power": Power}[name](v)
        if name == "compose":
            parts = [self.fn()]
            while self.peek() == ",":
                self.take(",")
                parts.append(self.fn())
            self.take(")")
            if len(parts) < 2:
                raise ValueError("compose needs at least two functions")
            return compose(*parts)
        raise ValueError(f"unknown function {name!r}")


def parse_fn(text: str) -> MonotoneFn:
    """Parse the canonical text syntax; round-trips with MonotoneFn.text()."""
    parser = _Parser(_tokenize(text))
    fn = parser.fn()
    if parser.peek() is not None:
        raise ValueError(f"trailing input in function spec: {parser.tokens[parser.pos:]}")
    return fn


# ---------------------------------------------------------------------------
# KN means

@dataclass(frozen=True, eq=False)
class WeightedValues:
    """Realizations of a random variable with their probabilities."""

    values: np.ndarray
    weights: Dist

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size != self.weights.n:
            raise ValueError("values and weights must have equal length")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def _kn_mean(values: np.ndarray, weights: np.ndarray, phi: MonotoneFn) -> float:
    mask = weights > 0
    transformed = phi.apply(values[mask])
    return float(phi.inverse(float(np.dot(weights[mask], transformed))))


def kn_mean(wv: WeightedValues, phi: MonotoneFn) -> float:
    """Quasi-arithmetic mean phi^{-1}(E[phi(Z)]) of the weighted values."""
    return _kn_mean(wv.values, wv.weights.probs, phi)


def conditional_kn_mean(table, joint, phi: MonotoneFn) -> np.ndarray:
    """Per-output KN mean of a value table g(x, y) under the posteriors.

    table: |X| x |Y| array; entry j of the result is the phi-mean of
    table[:, support[j]] weighted by the posterior given that output.
    """
    tbl = np.asarray(table, dtype=float)
    if tbl.shape != (joint.n_x, joint.n_y):
        raise ValueError(f"table shape {tbl.shape} does not match joint {joint.n_x}x{joint.n_y}")
    out = np.empty(joint.support.size)
    for j, y in enumerate(joint.support):
        out[j] = _kn_mean(tbl[:, y], joint.posterior_matrix[:, j], phi)
    return out
