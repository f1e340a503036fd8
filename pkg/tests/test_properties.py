import json
import math

import numpy as np
import pytest

from knentropy.conditional import AcSolverConfig
from knentropy.frameworks import (
    EAVG,
    EntropyFramework,
    PnormPowerCore,
    framework_cond_entropy,
    framework_entropy,
)
from knentropy.means import Affine, Exp, Log, Negate, QLog, compose, identity_fn
from knentropy.measures import Measure, build_measure
from knentropy.prob import Channel, Dist, make_joint
from knentropy.properties import (
    check_cre,
    check_dpi,
    check_example_identity,
    check_knavg_representation,
    counterexample_joint,
    replay,
    run_counterexample,
    sample_joint,
    trial_rng,
)
from knentropy.vulnerability import FiniteGain, SoftZeroOne, VulnSpec

FAST = AcSolverConfig(restarts=3, max_iters=2500)


def convex_core_measure() -> Measure:
    """Raw averaging framework around the convex power-sum core (order 2)."""
    fw = EntropyFramework(identity_fn(), PnormPowerCore(2.0), EAVG)
    return Measure(
        "raw-pnorm-power-eavg",
        {"alpha": 2.0},
        uncond=lambda p: framework_entropy(fw, p),
        cond=lambda j: framework_cond_entropy(fw, j),
    )


class TestCre:
    def test_shannon_passes(self):
        report = check_cre(build_measure("shannon"), trials=300, seed=0)
        assert report.verdict == "pass"
        assert report.worst_gap <= 0

    @pytest.mark.parametrize("name,alpha", [("arimoto", 2.0), ("hayashi", 0.5),
                                            ("hct-cond", 2.0)])
    def test_concave_core_measures_pass(self, name, alpha):
        report = check_cre(build_measure(name, alpha=alpha), trials=200, seed=1)
        assert report.verdict == "pass"

    def test_convex_core_fails_within_1000_trials_at_seed_0(self):
        report = check_cre(convex_core_measure(), trials=1000, seed=0)
        assert report.verdict == "fail"
        assert len(report.failures) > 0
        assert report.shrunk is not None and report.shrunk["gap"] > 0

    def test_pinned_violation_witness(self):
        # mixed reflected pair: conditional power sum 0.82 exceeds the prior's 0.5
        m = convex_core_measure()
        j = make_joint(Dist([0.5, 0.5]), Channel([[0.9, 0.1], [0.1, 0.9]]))
        lhs, rhs = m.cond(j), m.uncond(j.prior)
        assert lhs == pytest.approx(0.82, abs=1e-12)
        assert rhs == pytest.approx(0.5, abs=1e-12)
        assert lhs - rhs > 0.3

    def test_failures_replay_identically(self):
        m = convex_core_measure()
        report = check_cre(m, trials=50, seed=0)
        assert report.failures
        for f in report.failures[:5]:
            lhs, rhs = replay("cre", m, f.seed)
            assert lhs == f.lhs and rhs == f.rhs

    def test_needs_pair(self):
        with pytest.raises(ValueError):
            check_cre(build_measure("renyi", alpha=2.0), trials=1)


class TestDpi:
    def test_shannon_conditional_passes(self):
        report = check_dpi(build_measure("shannon"), trials=200, seed=7)
        assert report.verdict == "pass"

    @pytest.mark.parametrize("name,alpha", [("arimoto", 0.5), ("hayashi", 2.0),
                                            ("hct-cond", 0.5)])
    def test_renyi_type_measures_pass(self, name, alpha):
        report = check_dpi(build_measure(name, alpha=alpha), trials=150, seed=3)
        assert report.verdict == "pass"

    def test_dpi_failures_replay(self):
        # convex-core EAVG violates DPI too; use it to exercise the failure path
        report = check_dpi(convex_core_measure(), trials=80, seed=0)
        if report.failures:
            f = report.failures[0]
            lhs, rhs = replay("dpi", convex_core_measure(), f.seed)
            assert lhs == f.lhs and rhs == f.rhs


class TestReportShape:
    def test_json_round_trip(self):
        report = check_cre(convex_core_measure(), trials=30, seed=0)
        payload = json.loads(report.to_json())
        assert payload["verdict"] == report.verdict
        assert payload["trials"] == 30
        assert isinstance(payload["failures"], list)
        assert "seed" in payload["failures"][0]

    def test_table_contains_verdict(self):
        report = check_cre(build_measure("shannon"), trials=20, seed=0)
        assert "verdict=pass" in report.table()


class TestCounterexample:
    def test_reference_numbers(self):
        rep = run_counterexample()
        assert rep.symmetric_entropy == pytest.approx(0.3251, abs=5e-4)
        assert rep.deterministic_bound == pytest.approx(0.2107, abs=5e-4)
        assert rep.deterministic_bound == pytest.approx(-2 * math.log(0.9), abs=1e-12)
        assert rep.solver_value <= rep.deterministic_bound + 1e-6
        assert rep.gap >= 0.11
        assert rep.passed

    def test_solver_matches_grid_oracle(self):
        rep = run_counterexample()
        assert abs(rep.solver_value - rep.oracle_value) <= 1e-4

    def test_instance_shape(self):
        j = counterexample_joint()
        assert np.allclose(j.prior.probs, [0.5, 0.5])
        assert np.allclose(j.channel.rows, [[0.9, 0.1], [0.1, 0.9]])
        assert np.allclose(j.posterior(0).probs, [0.9, 0.1])

    def test_custom_p0(self):
        rep = run_counterexample(p0=(0.8, 0.2))
        assert rep.symmetric_entropy == pytest.approx(
            -(0.8 * math.log(0.8) + 0.2 * math.log(0.2)), rel=1e-12
        )

    def test_json_fields(self):
        payload = json.loads(run_counterexample().to_json())
        for key in ("symmetric_entropy", "deterministic_bound", "solver_value",
                    "oracle_value", "gap", "passed", "solver"):
            assert key in payload


class TestKnAvgRepresentation:
    @pytest.mark.parametrize(
        "psi",
        [identity_fn(), Exp(), Affine(3.0, -1.0), compose(Negate(), Log())],
        ids=["identity", "exp", "affine", "neg-log"],
    )
    def test_soft01_log_gain(self, psi):
        spec = VulnSpec(Log(), psi, SoftZeroOne(), FAST)
        report = check_knavg_representation(spec, trials=15, seed=3)
        assert report.verdict == "pass", report.table()

    def test_finite_gain(self):
        table = np.random.default_rng(0).uniform(0.5, 2.0, size=(3, 3))
        # fixed 3-state gain: sample joints with |X| = 3
        from knentropy.prob import random_joint

        spec = VulnSpec(QLog(2.0), Exp(), FiniteGain(table), FAST)
        from knentropy.frameworks import VulnCore, epknavg
        from knentropy.vulnerability import g_posterior_entropy

        psi_reflected = compose(Negate(), spec.psi, Negate())
        fw = EntropyFramework(identity_fn(), VulnCore(spec), epknavg(psi_reflected))
        for t in range(25):
            j = random_joint(trial_rng(11, t), 3, 3)
            lhs = g_posterior_entropy(j, spec)
            rhs = framework_cond_entropy(fw, j)
            assert lhs == pytest.approx(rhs, abs=1e-9)


class TestIdentitySuite:
    @pytest.mark.parametrize("name", ["shannon", "shannon-cond", "arimoto"])
    def test_closed_form_identities(self, name):
        report = check_example_identity(name, alpha=2.0, trials=8, seed=2, cfg=FAST)
        assert report.verdict == "pass", report.table()

    def test_ac_identity(self):
        report = check_example_identity("ac", alpha=2.0, trials=4, seed=2, cfg=FAST)
        assert report.verdict == "pass", report.table()

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            check_example_identity("hayashi")


class TestSampling:
    def test_trial_rng_is_deterministic(self):
        a = sample_joint(trial_rng(5, 3))
        b = sample_joint(trial_rng(5, 3))
        assert np.array_equal(a.prior.probs, b.prior.probs)
        assert np.array_equal(a.channel.rows, b.channel.rows)

    def test_dims_stay_small(self):
        for t in range(50):
            j = sample_joint(trial_rng(1, t))
            assert 2 <= j.n_x <= 4 and 2 <= j.n_y <= 4
