"""Named, parameterized measures: the bridge between the CLI, the property
harness, and the library evaluators.

A Measure bundles an unconditional evaluator over priors with its natural
conditional counterpart (the pair the conditioning-reduces-entropy check
compares), plus a flag for optimizer-valued evaluations that need slack
tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .conditional import (
    AcSolverConfig,
    arimoto,
    augustin_csiszar,
    hayashi,
    hct_conditional,
    shannon_conditional,
    sharma_mittal_conditional,
)
from .entropy import LIMIT, hct, renyi, shannon, sharma_mittal
from .means import MonotoneFn, parse_fn
from .prob import Dist, Joint
from .vulnerability import (
    GainFn,
    SoftZeroOne,
    VulnSpec,
    bayes_vulnerability,
    flatten_gain,
    g_bayes_entropy,
    g_entropy,
    g_posterior_entropy,
    parse_gain,
    posterior_vulnerability,
    prior_vulnerability,
)

MEASURE_NAMES = (
    "shannon",
    "renyi",
    "hct",
    "sharma-mittal",
    "shannon-cond",
    "arimoto",
    "hayashi",
    "ac",
    "hct-cond",
    "sm-cond",
    "g-entropy",
    "g-post-entropy",
    "g-bayes-entropy",
    "prior-vuln",
    "post-vuln",
    "bayes-vuln",
)


@dataclass(frozen=True, eq=False)
class Measure:
    name: str
    params: dict = field(default_factory=dict)
    uncond: Callable[[Dist], float] | None = None
    cond: Callable[[Joint], float] | None = None
    optimizer_valued: bool = False

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"


def _as_fn(value) -> MonotoneFn:
    return value if isinstance(value, MonotoneFn) else parse_fn(value)


def _as_gain(value) -> GainFn:
    return value if isinstance(value, GainFn) else parse_gain(value)


def build_measure(
    name: str,
    alpha: float | None = None,
    beta: float | None = None,
    phi=None,
    psi=None,
    gain=None,
    solver: AcSolverConfig | None = None,
) -> Measure:
    """Construct a named measure; see MEASURE_NAMES for the vocabulary."""
    name = name.lower()
    a = LIMIT if alpha is None else float(alpha)
    b = LIMIT if beta is None else float(beta)
    cfg = solver or AcSolverConfig()

    if name == "shannon" or name == "shannon-cond":
        return Measure(name, {}, uncond=shannon, cond=shannon_conditional)
    if name == "renyi":
        return Measure(name, {"alpha": a}, uncond=lambda p: renyi(p, a))
    if name == "hct":
        return Measure(name, {"alpha": a}, uncond=lambda p: hct(p, a))
    if name == "sharma-mittal":
        return Measure(name, {"alpha": a, "beta": b},
                       uncond=lambda p: sharma_mittal(p, a, b))
    if name == "arimoto":
        return Measure(name, {"alpha": a}, uncond=lambda p: renyi(p, a),
                       cond=lambda j: arimoto(j, a))
    if name == "hayashi":
        return Measure(name, {"alpha": a}, uncond=lambda p: renyi(p, a),
                       cond=lambda j: hayashi(j, a))
    if name == "ac":
        return Measure(
            name, {"alpha": a}, uncond=shannon,
            cond=lambda j: augustin_csiszar(j, a, cfg).value,
            optimizer_valued=True,
        )
    if name == "hct-cond":
        return Measure(name, {"alpha": a}, uncond=lambda p: hct(p, a),
                       cond=lambda j: hct_conditional(j, a))
    if name == "sm-cond":
        return Measure(name, {"alpha": a, "beta": b},
                       uncond=lambda p: sharma_mittal(p, a, b),
                       cond=lambda j: sharma_mittal_conditional(j, a, b))

    if name in ("g-entropy", "g-post-entropy", "g-bayes-entropy",
                "prior-vuln", "post-vuln", "bayes-vuln"):
        if phi is None or gain is None:
            raise ValueError(f"measure {name!r} needs phi and gain (psi defaults to phi)")
        phi_fn = _as_fn(phi)
        psi_fn = _as_fn(psi) if psi is not None else phi_fn
        spec = VulnSpec(phi_fn, psi_fn, _as_gain(gain), cfg)
        base, _ = flatten_gain(spec.gain)
        soft = isinstance(base, SoftZeroOne)
        params = {"phi": phi_fn.text(), "psi": psi_fn.text()}
        if name == "g-entropy":
            return Measure(name, params, uncond=lambda p: g_entropy(p, spec),
                           optimizer_valued=soft)
        if name == "g-post-entropy":
            return Measure(name, params, uncond=lambda p: g_entropy(p, spec),
                           cond=lambda j: g_posterior_entropy(j, spec),
                           optimizer_valued=soft)
        if name == "g-bayes-entropy":
            return Measure(name, params, uncond=lambda p: g_entropy(p, spec),
                           cond=lambda j: g_bayes_entropy(j, spec),
                           optimizer_valued=soft)
        if name == "prior-vuln":
            return Measure(name, params, uncond=lambda p: prior_vulnerability(p, spec),
                           optimizer_valued=soft)
        if name == "post-vuln":
            return Measure(name, params, cond=lambda j: posterior_vulnerability(j, spec),
                           optimizer_valued=soft)
        return Measure(name, params, cond=lambda j: bayes_vulnerability(j, spec).value,
                       optimizer_valued=soft)

    raise ValueError(f"unknown measure {name!r}; choose from {MEASURE_NAMES}")
