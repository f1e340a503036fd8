"""Core-function entropy frameworks and their conditional-entropy constructors.

An entropy here is eta(F(p)) for a strictly increasing eta and a continuous
core F over the simplex. Conditional values aggregate the core over the
posteriors by expectation (EAVG), geometric mean (EGM), or a KN mean
(EPKNAVG), then apply eta. Cores form a closed enumeration so each carries
its own concavity metadata, which is what the core-concavity (CCV) property
tests exercise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .entropy import hct as _hct
from .entropy import shannon as _shannon
from .means import (
    Affine,
    Compose,
    Log,
    MonotoneFn,
    Negate,
    Power,
    QLog,
    _kn_mean,
    compose,
    identity_fn,
    parse_fn,
)
from .prob import Dist
from .vulnerability import VulnSpec, prior_vulnerability

__all__ = [
    "CoreFn",
    "ShannonCore",
    "HctCore",
    "PnormCore",
    "PnormPowerCore",
    "NegatedCore",
    "TransformedCore",
    "VulnCore",
    "Aggregator",
    "EAVG",
    "EGM",
    "epknavg",
    "EntropyFramework",
    "framework_entropy",
    "framework_cond_entropy",
    "to_eavg",
    "check_ccv",
    "CcvReport",
    "shannon_framework",
    "renyi_framework",
    "hayashi_framework",
    "arimoto_framework",
    "hct_conditional_framework",
    "sm_conditional_framework",
    "parse_core",
    "parse_framework",
]


class CoreFn:
    """Continuous map from the probability simplex to the reals."""

    concave: bool | None = None  # known concavity on the simplex; None = unknown
    convex: bool | None = None
    nonnegative: bool | None = None

    def evaluate(self, p) -> float:
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.text()

    def _dist(self, p) -> Dist:
        return p if isinstance(p, Dist) else Dist(np.asarray(p, dtype=float))


class ShannonCore(CoreFn):
    concave = True
    convex = False
    nonnegative = True

    def evaluate(self, p) -> float:
        return _shannon(self._dist(p))

    def text(self) -> str:
        return "shannon"


@dataclass(frozen=True, eq=False)
class HctCore(CoreFn):
    alpha: float

    concave = True
    convex = False
    nonnegative = True

    def evaluate(self, p) -> float:
        return _hct(self._dist(p), self.alpha)

    def text(self) -> str:
        return f"hct({self.alpha!r})"


@dataclass(frozen=True, eq=False)
class PnormPowerCore(CoreFn):
    """F(p) = sum_x p(x)^alpha; concave below order 1, convex above."""

    alpha: float

    nonnegative = True

    @property
    def concave(self) -> bool:
        return self.alpha < 1

    @property
    def convex(self) -> bool:
        return self.alpha > 1

    def evaluate(self, p) -> float:
        d = self._dist(p)
        sp = d.probs[d.probs > 0]
        return float(np.sum(sp**self.alpha))

    def text(self) -> str:
        return f"pnorm_power({self.alpha!r})"


@dataclass(frozen=True, eq=False)
class PnormCore(CoreFn):
    """F(p) = (sum_x p(x)^alpha)^(1/alpha)."""

    alpha: float

    nonnegative = True

    @property
    def concave(self) -> bool:
        return self.alpha <= 1

    @property
    def convex(self) -> bool:
        return self.alpha >= 1

    def evaluate(self, p) -> float:
        d = self._dist(p)
        sp = d.probs[d.probs > 0]
        return float(np.sum(sp**self.alpha) ** (1.0 / self.alpha))

    def text(self) -> str:
        return f"pnorm({self.alpha!r})"


@dataclass(frozen=True, eq=False)
class NegatedCore(CoreFn):
    inner: CoreFn

    nonnegative = False

    @property
    def concave(self):
        return self.inner.convex

    @property
    def convex(self):
        return self.inner.concave

    def evaluate(self, p) -> float:
        return -self.inner.evaluate(p)

    def text(self) -> str:
        return f"neg({self.inner.text()})"


@dataclass(frozen=True, eq=False)
class TransformedCore(CoreFn):
    """fn o inner; concavity is established numerically, not symbolically."""

    fn: MonotoneFn
    inner: CoreFn

    concave = None
    convex = None
    nonnegative = None

    def evaluate(self, p) -> float:
        return float(self.fn(self.inner.evaluate(p)))

    def text(self) -> str:
        return f"via({self.fn.text()},{self.inner.text()})"


@dataclass(frozen=True, eq=False)
class VulnCore(CoreFn):
    """Negated prior vulnerability as a core: F(p) = -V_{phi,g}(p)."""

    spec: VulnSpec

    concave = None  # concave when phi is strictly concave; verified numerically
    convex = None
    nonnegative = None

    def evaluate(self, p) -> float:
        return -prior_vulnerability(self._dist(p), self.spec)

    def text(self) -> str:
        return f"vuln(phi={self.spec.phi.text()})"


# ---------------------------------------------------------------------------
# aggregators and frameworks

@dataclass(frozen=True, eq=False)
class Aggregator:
    kind: str  # eavg | egm | epknavg
    psi: MonotoneFn | None = None

    def text(self) -> str:
        if self.kind == "epknavg":
            return f"epknavg({self.psi.text()})"
        return self.kind


EAVG = Aggregator("eavg")
EGM = Aggregator("egm")


def epknavg(psi: MonotoneFn) -> Aggregator:
    return Aggregator("epknavg", psi)


@dataclass(frozen=True, eq=False)
class EntropyFramework:
    eta: MonotoneFn
    core: CoreFn
    aggregator: Aggregator = EAVG

    def __post_init__(self):
        if self.eta.direction <= 0:
            raise ValueError("framework eta must be strictly increasing")
        if self.aggregator.kind == "epknavg" and self.aggregator.psi is None:
            raise ValueError("EPKNAVG aggregator needs a KN-mean function")

    def text(self) -> str:
        return (
            f"framework(eta={self.eta.text()}, core={self.core.text()}, "
            f"agg={self.aggregator.text()})"
        )

    def __repr__(self) -> str:
        return self.text()


def framework_entropy(fw: EntropyFramework, p: Dist) -> float:
    """Unconditional value eta(core(p))."""
    return float(fw.eta(fw.core.evaluate(p)))


def framework_cond_entropy(fw: EntropyFramework, j) -> float:
    """Aggregate the core over the supported posteriors, then apply eta."""
    py = j.marginal.probs[j.support]
    vals = np.array([fw.core.evaluate(j.posterior_matrix[:, k]) for k in range(j.support.size)])
    kind = fw.aggregator.kind
    if kind == "eavg":
        agg = float(np.dot(py, vals))
    elif kind == "egm":
        if np.any(vals < 0):
            raise ValueError("EGM aggregation needs non-negative core values")
        if np.any(vals == 0):
            agg = 0.0  # a single zero core value with positive weight kills the product
        else:
            agg = float(np.exp(np.dot(py, np.log(vals))))
    elif kind == "epknavg":
        agg = _kn_mean(vals, py, fw.aggregator.psi)
    else:
        raise ValueError(f"unknown aggregator {kind!r}")
    return float(fw.eta(agg))


def to_eavg(fw: EntropyFramework, check: bool = True, check_trials: int = 10_000,
            seed: int = 0) -> EntropyFramework:
    """Rewrite an EPKNAVG framework as a plain EAVG one with equal values.

    Increasing psi folds into eta' = eta o psi^{-1} with core' = psi o core;
    decreasing psi additionally reflects through negation so eta' stays
    increasing. The rewrite preserves conditional values identically; it
    yields a *bona fide* averaging entropy only when core' is concave, which
    is checked numerically (a failed check warns and still returns the
    rewrite).
    """
    if fw.aggregator.kind != "epknavg":
        raise ValueError("to_eavg expects an EPKNAVG framework")
    psi = fw.aggregator.psi
    if psi.direction > 0:
        eta2 = Compose(fw.eta, psi.inverse_fn())
        core2 = TransformedCore(psi, fw.core)
    else:
        eta2 = compose(fw.eta, psi.inverse_fn(), Negate())
        core2 = TransformedCore(Compose(Negate(), psi), fw.core)
    if check:
        report = check_ccv(core2, trials=check_trials, seed=seed)
        if not report.passed:
            warnings.warn(
                "EPKNAVG -> EAVG rewrite: transformed core failed the numeric "
                f"concavity check (worst violation {report.worst_violation:.3e}); "
                "the rewrite preserves values but the result is not core-concave",
                stacklevel=2,
            )
    return EntropyFramework(eta2, core2, EAVG)


# ---------------------------------------------------------------------------
# core-concavity check

@dataclass(frozen=True)
class CcvReport:
    passed: bool
    trials: int
    worst_violation: float
    witness: dict | None
    tol: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "trials": self.trials,
            "worst_violation": self.worst_violation,
            "witness": self.witness,
            "tol": self.tol,
        }


def check_ccv(target, trials: int = 1000, seed: int = 0, tol: float = 1e-10,
              dims=(2, 3, 4)) -> CcvReport:
    """Sample (p, q, lambda) and test midpoint concavity of the core.

    Accepts a CoreFn or an EntropyFramework (its core is used). Fails when
    core(lam p + (1-lam) q) < lam core(p) + (1-lam) core(q) - tol for some
    sample; the worst violation and its witness are reported.
    """
    core = target.core if isinstance(target, EntropyFramework) else target
    dims = tuple(dims)
    weights = np.array([0.5, 0.3, 0.2][: len(dims)])
    weights = weights / weights.sum()
    worst = -np.inf
    witness = None
    passed = True
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        n = int(rng.choice(dims, p=weights))
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n))
        lam = float(rng.uniform())
        lhs = core.evaluate(lam * p + (1 - lam) * q)
        rhs = lam * core.evaluate(p) + (1 - lam) * core.evaluate(q)
        violation = rhs - lhs
        if violation > worst:
            worst = violation
            witness = {
                "trial": t,
                "p": p.tolist(),
                "q": q.tolist(),
                "lam": lam,
                "lhs": lhs,
                "rhs": rhs,
            }
        if violation > tol:
            passed = False
    return CcvReport(passed=passed, trials=trials, worst_violation=float(worst),
                     witness=witness if not passed else None, tol=tol)


# ---------------------------------------------------------------------------
# named framework families
#
# For orders above 1 the power-sum cores are convex and the natural eta is
# decreasing, so the packagings below flip both signs to keep eta increasing
# and the core concave; values are unchanged.

def shannon_framework() -> EntropyFramework:
    return EntropyFramework(identity_fn(), ShannonCore(), EAVG)


def renyi_framework(alpha: float) -> EntropyFramework:
    """EAVG packaging whose unconditional value is the Renyi entropy and
    whose conditional value is the Hayashi conditional entropy."""
    scale = Affine(1.0 / (1.0 - alpha), 0.0)
    if alpha < 1:
        return EntropyFramework(compose(scale, QLog(1.0)), PnormPowerCore(alpha), EAVG)
    return EntropyFramework(
        compose(scale, QLog(1.0), Negate()),
        NegatedCore(PnormPowerCore(alpha)),
        EAVG,
    )


hayashi_framework = renyi_framework


def arimoto_framework(alpha: float) -> EntropyFramework:
    """EAVG packaging whose conditional value is the Arimoto conditional entropy."""
    scale = Affine(alpha / (1.0 - alpha), 0.0)
    if alpha < 1:
        return EntropyFramework(compose(scale, Log()), PnormCore(alpha), EAVG)
    return EntropyFramework(
        compose(scale, Log(), Negate()), NegatedCore(PnormCore(alpha)), EAVG
    )


def hct_conditional_framework(alpha: float) -> EntropyFramework:
    """EAVG packaging of the HCT core (expected-posterior HCT conditional)."""
    return EntropyFramework(identity_fn(), HctCore(alpha), EAVG)


def sm_conditional_framework(alpha: float, beta: float) -> EntropyFramework:
    """EAVG packaging whose conditional value is the Sharma-Mittal conditional."""
    if alpha < 1:
        eta = compose(QLog(beta), Power(1.0 / (1.0 - alpha)))
        return EntropyFramework(eta, PnormPowerCore(alpha), EAVG)
    eta = compose(QLog(beta), Power(1.0 / (1.0 - alpha)), Negate())
    return EntropyFramework(eta, NegatedCore(PnormPowerCore(alpha)), EAVG)


# ---------------------------------------------------------------------------
# text syntax

def parse_core(text: str) -> CoreFn:
    """Parse core syntax: shannon | hct(a) | pnorm(a) | pnorm_power(a) | neg(core)."""
    text = text.strip().lower().replace("-", "_")
    if text == "shannon":
        return ShannonCore()
    for name, cls in (("hct", HctCore), ("pnorm_power", PnormPowerCore), ("pnorm", PnormCore)):
        if text.startswith(f"{name}(") and text.endswith(")"):
            return cls(float(text[len(name) + 1 : -1]))
    if text.startswith("neg(") and text.endswith(")"):
        return NegatedCore(parse_core(text[4:-1]))
    raise ValueError(f"unknown core spec {text!r}")


def parse_framework(text: str) -> EntropyFramework:
    """Parse `framework(eta=..., core=..., agg=...)` with agg in
    {eavg, egm, epknavg(fn)}."""
    body = text.strip()
    if not (body.startswith("framework(") and body.endswith(")")):
        raise ValueError(f"framework spec must look like framework(...): {text!r}")
    body = body[len("framework(") : -1]
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    kv = {}
    for part in parts:
        key, _, value = part.partition("=")
        kv[key.strip().lower()] = value.strip()
    missing = {"eta", "core", "agg"} - set(kv)
    if missing:
        raise ValueError(f"framework spec missing {sorted(missing)}")
    agg_text = kv["agg"].lower()
    if agg_text == "eavg":
        agg = EAVG
    elif agg_text == "egm":
        agg = EGM
    elif agg_text.startswith("epknavg(") and agg_text.endswith(")"):
        agg = epknavg(parse_fn(agg_text[len("epknavg(") : -1]))
    else:
        raise ValueError(f"unknown aggregator {kv['agg']!r}")
    return EntropyFramework(parse_fn(kv["eta"]), parse_core(kv["core"]), agg)
