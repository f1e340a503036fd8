"""Property-test harness: conditioning-reduces-entropy and data-processing
checks over seeded random instances, the averaging-impossibility
counterexample, and the KN-averaging representation identity.

Every trial derives its own generator from (base seed, trial index), so any
recorded failure replays exactly. Comparisons against optimizer-valued
measures get a 1e-4 slack on top of the closed-form tolerance.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .conditional import (
    AcSolverConfig,
    ac_grid_oracle,
    ac_objective,
    arimoto,
    augustin_csiszar,
    shannon_conditional,
)
from .entropy import shannon
from .frameworks import EntropyFramework, VulnCore, epknavg, framework_cond_entropy
from .means import Exp, Log, Negate, QLog, compose, identity_fn
from .measures import Measure
from .prob import (
    Channel,
    Dist,
    Joint,
    MarkovTriple,
    compose_markov,
    make_joint,
    random_joint,
    random_markov,
)
from .vulnerability import (
    SoftZeroOne,
    Transformed,
    VulnSpec,
    bayes_vulnerability,
    g_entropy,
    g_posterior_entropy,
)

OPTIMIZER_SLACK = 1e-4

_DIM_POOL = (2, 3, 4)
_DIM_WEIGHTS = (0.5, 0.3, 0.2)  # biased small so brute-force oracles stay feasible


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _dims(rng: np.random.Generator, k: int) -> list[int]:
    w = np.array(_DIM_WEIGHTS)
    return [int(rng.choice(_DIM_POOL, p=w / w.sum())) for _ in range(k)]


def sample_joint(rng: np.random.Generator) -> Joint:
    nx, ny = _dims(rng, 2)
    return random_joint(rng, nx, ny)


def sample_markov(rng: np.random.Generator) -> MarkovTriple:
    nx, ny, nz = _dims(rng, 3)
    return random_markov(rng, nx, ny, nz)


def _digest(*arrays) -> str:
    h = hashlib.sha1()
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype=float).tobytes())
    return h.hexdigest()[:12]


@dataclass(frozen=True)
class Failure:
    seed: tuple  # (base seed, trial index): feed to numpy.default_rng to replay
    digest: str
    lhs: float
    rhs: float
    gap: float

    def to_dict(self) -> dict:
        return {"seed": list(self.seed), "digest": self.digest,
                "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap}


@dataclass
class PropertyReport:
    property: str
    measure: str
    trials: int
    tol: float
    failures: list[Failure] = field(default_factory=list)
    worst_gap: float = float("-inf")
    shrunk: dict | None = None

    @property
    def verdict(self) -> str:
        return "pass" if not self.failures else "fail"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "measure": self.measure,
            "trials": self.trials,
            "tol": self.tol,
            "verdict": self.verdict,
            "worst_gap": self.worst_gap,
            "failures": [f.to_dict() for f in self.failures],
            "shrunk": self.shrunk,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def table(self) -> str:
        lines = [
            f"property={self.property} measure={self.measure} verdict={self.verdict}",
            f"trials={self.trials} tol={self.tol:g} worst_gap={self.worst_gap:.6g} "
            f"failures={len(self.failures)}",
        ]
        for f in self.failures[:10]:
            lines.append(
                f"  seed={f.seed} digest={f.digest} lhs={f.lhs:.6g} "
                f"rhs={f.rhs:.6g} gap={f.gap:.6g}"
            )
        if len(self.failures) > 10:
            lines.append(f"  ... {len(self.failures) - 10} more")
        return "\n".join(lines)


def _effective_tol(measure: Measure, tol: float) -> float:
    return tol + (OPTIMIZER_SLACK if measure.optimizer_valued else 0.0)


# ---------------------------------------------------------------------------
# CRE / DPI

def check_cre(measure: Measure, trials: int = 1000, seed: int = 0,
              tol: float = 1e-10, sampler=None) -> PropertyReport:
    """Conditioning reduces entropy: cond(joint) <= uncond(prior) + tol.

    sampler(rng) -> Joint overrides the default small-alphabet sampling
    (needed when the measure's gain table fixes the input alphabet size).
    """
    if measure.uncond is None or measure.cond is None:
        raise ValueError(f"measure {measure.name!r} lacks an (uncond, cond) pair")
    sampler = sampler or sample_joint
    eff = _effective_tol(measure, tol)
    report = PropertyReport("cre", measure.label, trials, eff)
    worst_failing = None
    for t in range(trials):
        j = sampler(trial_rng(seed, t))
        lhs = measure.cond(j)
        rhs = measure.uncond(j.prior)
        gap = lhs - rhs
        report.worst_gap = max(report.worst_gap, gap)
        if gap > eff:
            fail = Failure((seed, t), _digest(j.prior.probs, j.channel.rows), lhs, rhs, gap)
            report.failures.append(fail)
            if worst_failing is None or gap > worst_failing[0]:
                worst_failing = (gap, j)
    if worst_failing is not None:
        report.failures.sort(key=lambda f: -f.gap)
        report.shrunk = _shrink_cre(measure, worst_failing[1], eff)
    return report


def check_dpi(measure: Measure, trials: int = 500, seed: int = 0,
              tol: float = 1e-10, sampler=None) -> PropertyReport:
    """Data processing: cond(X|Y) <= cond(X|Z) + tol along Markov chains."""
    if measure.cond is None:
        raise ValueError(f"measure {measure.name!r} lacks a conditional evaluator")
    sampler = sampler or sample_markov
    eff = _effective_tol(measure, tol)
    report = PropertyReport("dpi", measure.label, trials, eff)
    worst_failing = None
    for t in range(trials):
        triple = sampler(trial_rng(seed, t))
        xy, xz = compose_markov(triple)
        lhs = measure.cond(xy)
        rhs = measure.cond(xz)
        gap = lhs - rhs
        report.worst_gap = max(report.worst_gap, gap)
        if gap > eff:
            fail = Failure(
                (seed, t),
                _digest(triple.prior.probs, triple.ch_xy.rows, triple.ch_yz.rows),
                lhs, rhs, gap,
            )
            report.failures.append(fail)
            if worst_failing is None or gap > worst_failing[0]:
                worst_failing = (gap, triple)
    if worst_failing is not None:
        report.failures.sort(key=lambda f: -f.gap)
        report.shrunk = _shrink_dpi(measure, worst_failing[1], eff)
    return report


def replay(property_name: str, measure: Measure, seed: tuple) -> tuple[float, float]:
    """Recompute (lhs, rhs) for a recorded failure seed."""
    rng = np.random.default_rng(list(seed))
    if property_name == "cre":
        j = sample_joint(rng)
        return measure.cond(j), measure.uncond(j.prior)
    if property_name == "dpi":
        xy, xz = compose_markov(sample_markov(rng))
        return measure.cond(xy), measure.cond(xz)
    raise ValueError(f"cannot replay property {property_name!r}")


# ---------------------------------------------------------------------------
# witness shrinking: blend components toward uniform while the violation holds

def _toward_uniform(probs: np.ndarray) -> np.ndarray:
    return 0.5 * (probs + np.full_like(probs, 1.0 / probs.size))


def _shrink_cre(measure: Measure, j: Joint, eff: float, rounds: int = 24) -> dict:
    def violation(cand: Joint) -> float:
        return measure.cond(cand) - measure.uncond(cand.prior)

    current, gap = j, violation(j)
    for _ in range(rounds):
        stepped = False
        candidates = [
            make_joint(Dist(_toward_uniform(current.prior.probs)), current.channel),
            make_joint(current.prior,
                       Channel(np.vstack([_toward_uniform(r) for r in current.channel.rows]))),
        ]
        for cand in candidates:
            g = violation(cand)
            if g > eff:
                current, gap = cand, g
                stepped = True
                break
        if not stepped:
            break
    return {
        "prior": current.prior.probs.tolist(),
        "channel": current.channel.rows.tolist(),
        "lhs": measure.cond(current),
        "rhs": measure.uncond(current.prior),
        "gap": gap,
    }


def _shrink_dpi(measure: Measure, t: MarkovTriple, eff: float, rounds: int = 24) -> dict:
    def violation(cand: MarkovTriple) -> float:
        xy, xz = compose_markov(cand)
        return measure.cond(xy) - measure.cond(xz)

    current, gap = t, violation(t)
    for _ in range(rounds):
        stepped = False
        smooth_rows = lambda ch: Channel(np.vstack([_toward_uniform(r) for r in ch.rows]))
        candidates = [
            MarkovTriple(Dist(_toward_uniform(current.prior.probs)), current.ch_xy, current.ch_yz),
            MarkovTriple(current.prior, smooth_rows(current.ch_xy), current.ch_yz),
            MarkovTriple(current.prior, current.ch_xy, smooth_rows(current.ch_yz)),
        ]
        for cand in candidates:
            g = violation(cand)
            if g > eff:
                current, gap = cand, g
                stepped = True
                break
        if not stepped:
            break
    xy, xz = compose_markov(current)
    return {
        "prior": current.prior.probs.tolist(),
        "ch_xy": current.ch_xy.rows.tolist(),
        "ch_yz": current.ch_yz.rows.tolist(),
        "lhs": measure.cond(xy),
        "rhs": measure.cond(xz),
        "gap": gap,
    }


# ---------------------------------------------------------------------------
# the averaging-impossibility counterexample

@dataclass(frozen=True)
class CounterexampleReport:
    """Three numbers around the mixed pair of reflected priors.

    symmetric_entropy is the value any averaging representation is forced
    to (both posteriors share one entropy), deterministic_bound is the
    objective at the aligned deterministic reverse conditional, and
    solver_value is the solved minimum. A strict gap between the forced
    value and the true minimum is the impossibility witness.
    """

    alpha: float
    symmetric_entropy: float  # (a)
    deterministic_bound: float  # (b)
    solver_value: float  # (c)
    oracle_value: float
    gap: float  # a - c
    passed: bool
    solver: dict

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "symmetric_entropy": self.symmetric_entropy,
            "deterministic_bound": self.deterministic_bound,
            "solver_value": self.solver_value,
            "oracle_value": self.oracle_value,
            "gap": self.gap,
            "passed": self.passed,
            "solver": self.solver,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def counterexample_joint(p0=(0.9, 0.1)) -> Joint:
    """Uniform mixture of a two-point prior and its reflection."""
    d0 = Dist(np.asarray(p0, dtype=float))
    if d0.n != 2:
        raise ValueError("counterexample instance needs a two-point distribution")
    d1 = Dist(d0.probs[::-1])
    channel = Channel(np.column_stack([d0.probs, d1.probs]))
    return make_joint(Dist.uniform(2), channel)


def run_counterexample(alpha: float = 2.0, p0=(0.9, 0.1),
                       cfg: AcSolverConfig | None = None) -> CounterexampleReport:
    """Reproduce the impossibility gap: the averaging-forced value strictly
    exceeds the solved minimum; the aligned deterministic rule sits between.
    """
    j = counterexample_joint(p0)
    a = shannon(Dist(np.asarray(p0, dtype=float)))
    b = ac_objective(j, alpha, np.eye(2))
    sol = augustin_csiszar(j, alpha, cfg)
    oracle = ac_grid_oracle(j, alpha)
    c = sol.value
    passed = (c <= b + 1e-6) and (b + 1e-6 < a) and (a - c >= 0.11)
    return CounterexampleReport(
        alpha=alpha,
        symmetric_entropy=a,
        deterministic_bound=b,
        solver_value=c,
        oracle_value=oracle.value,
        gap=a - c,
        passed=passed,
        solver={
            "iterations": sol.iterations,
            "converged": sol.converged,
            "method": sol.method,
            "best_start": sol.best_start,
        },
    )


# ---------------------------------------------------------------------------
# KN-averaging representation of the posterior g-entropy

def check_example_identity(name: str, alpha: float = 2.0, trials: int = 20,
                           seed: int = 0, tol: float = 1e-4,
                           cfg: AcSolverConfig | None = None) -> PropertyReport:
    """Vulnerability representations against direct formulas.

    name in {shannon, shannon-cond, arimoto, ac}: each measure has an exact
    soft 0-1 representation whose optimizer value must match the closed
    form (or the direct solver for 'ac'). Instances are 2x2 and 3x3 joints.
    """
    cfg = cfg or AcSolverConfig(restarts=4, max_iters=4000)
    log_soft = Transformed(Log(), SoftZeroOne())
    ident = identity_fn()
    lninv_exp = compose(QLog(1.0 / alpha), Exp())

    if name == "shannon":
        spec = VulnSpec(ident, ident, log_soft, cfg)
        pair = (lambda j: g_entropy(j.prior, spec), lambda j: shannon(j.prior))
    elif name == "shannon-cond":
        spec = VulnSpec(ident, ident, log_soft, cfg)
        pair = (lambda j: g_posterior_entropy(j, spec), shannon_conditional)
    elif name == "arimoto":
        spec = VulnSpec(lninv_exp, lninv_exp, log_soft, cfg)
        pair = (lambda j: g_posterior_entropy(j, spec), lambda j: arimoto(j, alpha))
    elif name == "ac":
        spec = VulnSpec(ident, lninv_exp, log_soft, cfg)
        pair = (
            lambda j: -bayes_vulnerability(j, spec).value,
            lambda j: augustin_csiszar(j, alpha, cfg).value,
        )
    else:
        raise ValueError(f"no identity representation registered for {name!r}")

    report = PropertyReport("identity", f"{name}(alpha={alpha:g})", trials, tol)
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = 2 if t % 2 == 0 else 3
        j = random_joint(rng, n, n)
        lhs, rhs = pair[0](j), pair[1](j)
        gap = abs(lhs - rhs)
        report.worst_gap = max(report.worst_gap, gap)
        if gap > tol:
            report.failures.append(
                Failure((seed, t), _digest(j.prior.probs, j.channel.rows), lhs, rhs, gap)
            )
    report.failures.sort(key=lambda f: -f.gap)
    return report


def check_knavg_representation(spec: VulnSpec, trials: int = 100, seed: int = 0,
                               tol: float = 1e-6) -> PropertyReport:
    """Posterior g-entropy equals the KN-averaged negated-vulnerability core.

    The framework mean is the negation-reflected psi (t -> -psi(-t)), the
    form under which the identity is exact for every monotone psi.
    """
    psi_reflected = compose(Negate(), spec.psi, Negate())
    fw = EntropyFramework(identity_fn(), VulnCore(spec), epknavg(psi_reflected))
    report = PropertyReport("identity", f"g-post-entropy~epknavg(phi={spec.phi.text()})",
                            trials, tol)
    for t in range(trials):
        j = sample_joint(trial_rng(seed, t))
        lhs = g_posterior_entropy(j, spec)
        rhs = framework_cond_entropy(fw, j)
        gap = abs(lhs - rhs)
        report.worst_gap = max(report.worst_gap, gap)
        if gap > tol:
            report.failures.append(
                Failure((seed, t), _digest(j.prior.probs, j.channel.rows), lhs, rhs, gap)
            )
    report.failures.sort(key=lambda f: -f.gap)
    return report
