"""Generalized g-vulnerabilities and the g-conditional entropies built on them.

Three quantities over a gain function g and monotone means phi (over X) and
psi (over Y):

  prior:     max_a M_phi[g(X, a)]
  posterior: M_psi over y of (max_a M_phi[g(X, a) | Y=y])
  Bayes:     max over decision rules of M_phi[ M_psi[g(X, rule(Y)) | X] ]

The Bayes objective couples all outputs through the inner mean given X, so
it does not decompose per output; finite action sets are solved by exact
rule enumeration up to a cap, soft 0-1 (distribution-valued) actions by
multi-start exponentiated gradient over the product of action simplices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .conditional import AcSolverConfig
from .means import Compose, MonotoneFn
from .prob import Dist, Joint
from .solvers import eg_multistart

ENUMERATION_CAP = 1_000_000
_CHUNK = 65536


# ---------------------------------------------------------------------------
# gain functions

class GainFn:
    """Adversary's payoff g(x, a)."""


@dataclass(frozen=True, eq=False)
class FiniteGain(GainFn):
    """Finite action set: table[x, a] is the payoff of action a on secret x."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2:
            raise ValueError("gain table must be 2-d (|X| x |A|)")
        if not np.all(np.isfinite(t)):
            raise ValueError("gain table must be finite-valued")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n_actions(self) -> int:
        return self.table.shape[1]


@dataclass(frozen=True)
class SoftZeroOne(GainFn):
    """Actions are distributions over X; g(x, r) = r(x)."""


@dataclass(frozen=True, eq=False)
class Transformed(GainFn):
    """Pointwise transform of another gain: g'(x, a) = fn(g(x, a))."""

    fn: MonotoneFn
    inner: GainFn


def flatten_gain(gain: GainFn) -> tuple[GainFn, MonotoneFn | None]:
    """Peel nested transforms into (base gain, composed transform or None)."""
    chain = None
    while isinstance(gain, Transformed):
        chain = gain.fn if chain is None else Compose(chain, gain.fn)
        gain = gain.inner
    return gain, chain


def parse_gain(text: str) -> GainFn:
    """Parse CLI gain syntax: soft01 | csv:PATH | transform(fn, gain)."""
    from .means import parse_fn

    text = text.strip()
    if text == "soft01":
        return SoftZeroOne()
    if text.startswith("csv:"):
        rows = np.loadtxt(text[4:], delimiter=",", ndmin=2)
        return FiniteGain(rows)
    if text.startswith("transform(") and text.endswith(")"):
        body = text[len("transform(") : -1]
        depth = 0
        for i, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return Transformed(parse_fn(body[:i]), parse_gain(body[i + 1 :]))
        raise ValueError(f"malformed transform gain: {text!r}")
    raise ValueError(f"unknown gain spec {text!r}")


# ---------------------------------------------------------------------------
# specs, rules, results

@dataclass(frozen=True, eq=False)
class VulnSpec:
    """Mean functions and gain for a generalized vulnerability.

    phi is the mean over X (inner for the posterior form, outer for the
    Bayes form); psi is the mean over Y. The solver config drives every
    optimizer-valued evaluation (soft 0-1 gains).
    """

    phi: MonotoneFn
    psi: MonotoneFn
    gain: GainFn
    solver: AcSolverConfig = field(default_factory=AcSolverConfig)


@dataclass(frozen=True, eq=False)
class DecisionRule:
    """Action per supported output: ints for finite gains, distributions for soft 0-1."""

    y_support: np.ndarray
    actions: tuple

    def action(self, y: int):
        idx = np.flatnonzero(self.y_support == y)
        if idx.size == 0:
            raise KeyError(f"output {y} has zero marginal mass")
        return self.actions[idx[0]]


@dataclass(frozen=True, eq=False)
class BayesSolution:
    value: float
    rule: DecisionRule
    method: str  # enumeration | coordinate_ascent | exp_gradient
    certified: bool  # True only for exhaustive enumeration
    iterations: int = 0
    converged: bool = True

    def __iter__(self):  # allow `value, rule = bayes_vulnerability(...)`
        return iter((self.value, self.rule))


def _phi_chain(phi: MonotoneFn, chain: MonotoneFn | None) -> MonotoneFn:
    return phi if chain is None else Compose(phi, chain)


def _pick(values: np.ndarray, direction: int) -> int:
    """Best index under the given monotone direction; first on ties."""
    return int(np.argmax(values)) if direction > 0 else int(np.argmin(values))


# ---------------------------------------------------------------------------
# soft 0-1 simplex optimization

def _soft01_best_response(weights: np.ndarray, phi: MonotoneFn, chain, cfg: AcSolverConfig,
                          seed_key) -> tuple[float, np.ndarray]:
    """max_r M_phi[g(X, r)] for g(x, r) = chain(r(x)) under the given weights.

    Optimizes over the sub-simplex supported on weights > 0 (mass elsewhere
    is wasted) and returns (value, full-length action).
    """
    u = _phi_chain(phi, chain)
    sup = np.flatnonzero(weights > 0)
    w = weights[sup]
    if sup.size == 1:
        action = np.zeros(weights.size)
        action[sup[0]] = 1.0
        return float(phi.inverse(u(1.0))), action

    # the iterates stay in [floor, 1]; verify the hull once and skip the
    # per-iteration domain checks inside the hot loop
    u.domain.require(np.array([cfg.floor, 1.0]), "gain chain on the action simplex")

    def f(R):
        return float(np.dot(w, u._apply(R[0])))

    def grad(R):
        return (w * u._derivative(R[0]))[None, :]

    rng = np.random.default_rng(seed_key)
    inits = [np.full((1, sup.size), 1.0 / sup.size), w[None, :]]
    for _ in range(max(0, cfg.restarts - len(inits))):
        inits.append(rng.dirichlet(np.ones(sup.size))[None, :])
    best_E, R, _, _, _ = eg_multistart(
        f, grad, inits, sense=phi.direction,
        step0=cfg.step_size, tol=cfg.tol, max_iters=cfg.max_iters, floor=cfg.floor,
    )
    action = np.zeros(weights.size)
    action[sup] = R[0]
    return float(phi.inverse(best_E)), action


# ---------------------------------------------------------------------------
# the three vulnerabilities

def prior_vulnerability(p: Dist, spec: VulnSpec) -> float:
    """max_a M_phi[g(X, a)] under the prior."""
    base, chain = flatten_gain(spec.gain)
    if isinstance(base, FiniteGain):
        u = _phi_chain(spec.phi, chain)
        vals = u.apply(base.table)
        mask = p.probs > 0
        E = p.probs[mask] @ vals[mask]
        return float(spec.phi.inverse(E[_pick(E, spec.phi.direction)]))
    value, _ = _soft01_best_response(p.probs, spec.phi, chain, spec.solver,
                                     [spec.solver.seed, 0])
    return value


def posterior_vulnerability(j: Joint, spec: VulnSpec) -> float:
    """M_psi over supported y of the per-posterior best response."""
    base, chain = flatten_gain(spec.gain)
    py = j.marginal.probs[j.support]
    if isinstance(base, FiniteGain):
        u = _phi_chain(spec.phi, chain)
        vals = u.apply(base.table)  # (nx, nA)
        E = j.posterior_matrix.T @ vals  # (k, nA)
        best = E.max(axis=1) if spec.phi.direction > 0 else E.min(axis=1)
        inner = np.asarray(spec.phi.inverse(best))
    else:
        inner = np.empty(j.support.size)
        for k in range(j.support.size):
            inner[k], _ = _soft01_best_response(
                j.posterior_matrix[:, k], spec.phi, chain, spec.solver,
                [spec.solver.seed, 1, k],
            )
    E_outer = float(np.dot(py, spec.psi.apply(inner)))
    return float(spec.psi.inverse(E_outer))


def _bayes_finite_values(p_act, W_act, psi_table, phi, psi, choices):
    """Objective T = sum_x p(x) phi(psi^{-1}(sum_y p(y|x) psi_table[x, c_y]))."""
    S = np.zeros((choices.shape[0], p_act.size))
    for col in range(W_act.shape[1]):
        S += W_act[:, col][None, :] * psi_table[:, choices[:, col]].T
    m = psi.inverse(S)
    return np.asarray(phi.apply(m)) @ p_act


def _enumerate_rules(n_actions: int, k: int):
    for combo in itertools.product(range(n_actions), repeat=k):
        yield combo


def bayes_vulnerability(j: Joint, spec: VulnSpec,
                        enumeration_cap: int = ENUMERATION_CAP) -> BayesSolution:
    """max over decision rules of M_phi[ M_psi[g(X, rule(Y)) | X] ].

    Finite gains: exact enumeration of all |A|^|supported Y| rules up to the
    cap (ties go to the lexicographically first rule), else coordinate
    ascent flagged non-certified. Soft 0-1 gains: multi-start exponentiated
    gradient over the product of action simplices, seeded with the per-output
    decomposed rule and the best constant rule.
    """
    base, chain = flatten_gain(spec.gain)
    active = j.prior.support
    p_act = j.prior.probs[active]
    W_act = j.channel.rows[np.ix_(active, j.support)]
    k = j.support.size

    if isinstance(base, FiniteGain):
        v = _phi_chain(spec.psi, chain)
        psi_table = np.asarray(v.apply(base.table[active]))  # (nx_act, nA)
        n_actions = base.n_actions
        if n_actions**k <= enumeration_cap:
            return _bayes_enumerate(j, spec, p_act, W_act, psi_table, n_actions, k)
        return _bayes_coordinate_ascent(j, spec, p_act, W_act, psi_table, n_actions, k)
    return _bayes_soft01(j, spec, chain, active, p_act, W_act, k)


def _bayes_enumerate(j, spec, p_act, W_act, psi_table, n_actions, k) -> BayesSolution:
    best_T, best_combo = None, None
    gen = _enumerate_rules(n_actions, k)
    sign = spec.phi.direction
    count = 0
    while True:
        block = list(itertools.islice(gen, _CHUNK))
        if not block:
            break
        choices = np.array(block, dtype=int)
        T = _bayes_finite_values(p_act, W_act, psi_table, spec.phi, spec.psi, choices)
        idx = _pick(T, sign)
        if best_T is None or sign * (T[idx] - best_T) > 0:
            best_T, best_combo = float(T[idx]), block[idx]
        count += len(block)
    rule = DecisionRule(j.support.copy(), tuple(best_combo))
    return BayesSolution(
        value=float(spec.phi.inverse(best_T)), rule=rule,
        method="enumeration", certified=True, iterations=count,
    )


def _bayes_coordinate_ascent(j, spec, p_act, W_act, psi_table, n_actions, k,
                             max_sweeps: int = 100) -> BayesSolution:
    sign = spec.phi.direction
    cfg = spec.solver
    rng = np.random.default_rng([cfg.seed, 2])

    def value_of(combo):
        return float(
            _bayes_finite_values(p_act, W_act, psi_table, spec.phi, spec.psi,
                                 np.asarray(combo, dtype=int)[None, :])[0]
        )

    # per-output decomposed rule (posterior-style best responses) as the first start
    base, chain = flatten_gain(spec.gain)
    phi_table = np.asarray(_phi_chain(spec.phi, chain).apply(base.table[j.prior.support]))
    post_act = j.posterior_matrix[j.prior.support]
    greedy = tuple(_pick(post_act[:, idx] @ phi_table, sign) for idx in range(k))
    starts = [greedy]
    for _ in range(cfg.restarts - 1):
        starts.append(tuple(int(a) for a in rng.integers(0, n_actions, size=k)))

    best_T, best_combo = None, None
    total = 0
    for combo in starts:
        combo = list(combo)
        current = value_of(combo)
        for _ in range(max_sweeps):
            changed = False
            for y in range(k):
                cand = np.tile(combo, (n_actions, 1))
                cand[:, y] = np.arange(n_actions)
                T = _bayes_finite_values(p_act, W_act, psi_table, spec.phi, spec.psi, cand)
                a = _pick(T, sign)
                total += n_actions
                if sign * (T[a] - current) > 0:
                    combo[y] = a
                    current = float(T[a])
                    changed = True
            if not changed:
                break
        if best_T is None or sign * (current - best_T) > 0:
            best_T, best_combo = current, tuple(combo)
    rule = DecisionRule(j.support.copy(), best_combo)
    return BayesSolution(
        value=float(spec.phi.inverse(best_T)), rule=rule,
        method="coordinate_ascent", certified=False, iterations=total,
    )


def _bayes_soft01(j, spec, chain, active, p_act, W_act, k) -> BayesSolution:
    cfg = spec.solver
    nx = active.size
    v = _phi_chain(spec.psi, chain)  # psi o gain-transform, applied to r(x)
    psi_inv = spec.psi.inverse_fn()

    # iterates live in [floor, 1]; the inner means then stay inside the
    # gain-value hull, so one upfront check covers the whole run
    hull = np.array([cfg.floor, 1.0])
    v.domain.require(hull, "psi o gain chain on the action simplex")
    gain_hull = np.asarray(chain.apply(hull)) if chain is not None else hull
    spec.phi.domain.require(gain_hull, "phi on the gain hull")
    spec.psi.domain.require(gain_hull, "psi on the gain hull")

    def T(R):
        S = np.einsum("xy,yx->x", W_act, v._apply(R))
        m = psi_inv._apply(S)
        return float(np.dot(p_act, spec.phi._apply(m)))

    def grad(R):
        vals = v._apply(R)
        S = np.einsum("xy,yx->x", W_act, vals)
        m = psi_inv._apply(S)
        outer = p_act * spec.phi._derivative(m) / spec.psi._derivative(m)
        return (outer[None, :] * W_act.T) * v._derivative(R)

    # decomposed per-output best responses and the best constant rule as
    # seeds; rough solves suffice since the joint run polishes them
    seed_cfg = replace(cfg, restarts=min(cfg.restarts, 2),
                       max_iters=min(cfg.max_iters, 400))
    decomposed = np.empty((k, nx))
    for idx in range(k):
        post = j.posterior_matrix[active, idx]
        _, action = _soft01_best_response(post / post.sum(), spec.phi, chain, seed_cfg,
                                          [cfg.seed, 3, idx])
        decomposed[idx] = action
    _, const_action = _soft01_best_response(p_act, spec.phi, chain, seed_cfg, [cfg.seed, 4])
    inits = [decomposed, np.tile(const_action, (k, 1)), np.full((k, nx), 1.0 / nx)]
    rng = np.random.default_rng([cfg.seed, 5])
    for _ in range(max(0, cfg.restarts - len(inits))):
        inits.append(rng.dirichlet(np.ones(nx), size=k))

    best_T, R, iters, conv, _ = eg_multistart(
        T, grad, inits, sense=spec.phi.direction,
        step0=cfg.step_size, tol=cfg.tol, max_iters=cfg.max_iters, floor=cfg.floor,
    )
    actions = []
    for idx in range(k):
        full = np.zeros(j.n_x)
        full[active] = R[idx]
        actions.append(full)
    rule = DecisionRule(j.support.copy(), tuple(actions))
    return BayesSolution(
        value=float(spec.phi.inverse(best_T)), rule=rule,
        method="exp_gradient", certified=False, iterations=iters, converged=conv,
    )


# ---------------------------------------------------------------------------
# transforms and g-entropies

def transform_spec(eta: MonotoneFn, spec: VulnSpec) -> VulnSpec:
    """Rescale a spec by a strictly increasing eta.

    Contract: eta(V) and eta(V-hat) of the original spec equal the plain
    vulnerabilities of the returned spec.
    """
    if eta.direction <= 0:
        raise ValueError("transform requires a strictly increasing function")
    inv = eta.inverse_fn()
    return replace(
        spec,
        phi=Compose(spec.phi, inv),
        psi=Compose(spec.psi, inv),
        gain=Transformed(eta, spec.gain),
    )


def g_entropy(p: Dist, spec: VulnSpec) -> float:
    """Negated prior vulnerability."""
    return -prior_vulnerability(p, spec)


def g_posterior_entropy(j: Joint, spec: VulnSpec) -> float:
    """Negated posterior vulnerability."""
    return -posterior_vulnerability(j, spec)


def g_bayes_entropy(j: Joint, spec: VulnSpec) -> float:
    """Negated Bayes vulnerability."""
    return -bayes_vulnerability(j, spec).value
