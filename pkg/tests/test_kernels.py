"""Backend equivalence: the compiled extension and the NumPy fallback must
implement the same semantics."""

import numpy as np
import pytest

from knentropy import kernels
from knentropy.kernels import _fallback

try:
    from knentropy.kernels import _ac

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernels unavailable")


def instance(seed, nx=2, ny=2):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(nx))
    W = rng.dirichlet(np.ones(ny), size=nx)
    return p, W


def brute_objective(p, W, R, s, coef):
    total = 0.0
    for x in range(len(p)):
        S = sum(W[x, y] * R[y, x] ** s for y in range(W.shape[1]) if W[x, y] > 0)
        if S <= 0 or not np.isfinite(S):
            return float("inf")
        total += p[x] * np.log(S)
    return coef * total


class TestFallbackCorrectness:
    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_objective_matches_scalar_reference(self, alpha):
        s, coef = 1 - 1 / alpha, alpha / (1 - alpha)
        for seed in range(20):
            p, W = instance(seed, 3, 2)
            R = np.random.default_rng(seed + 100).dirichlet(np.ones(3), size=2)
            assert _fallback.ac_objective(p, W, R, s, coef) == pytest.approx(
                brute_objective(p, W, R, s, coef), rel=1e-13
            )

    def test_objective_infeasible_point_mass(self):
        # alpha > 1 with a point mass that starves one input
        p, W = np.array([0.5, 0.5]), np.array([[0.9, 0.1], [0.1, 0.9]])
        R = np.array([[1.0, 0.0], [1.0, 0.0]])  # all mass on x=0
        assert _fallback.ac_objective(p, W, R, 0.5, -2.0) == np.inf

    def test_eg_descends(self):
        p, W = instance(7)
        s, coef = 0.5, -2.0
        R0 = np.full((2, 2), 0.5)
        J0 = _fallback.ac_objective(p, W, R0, s, coef)
        J, R, iters, converged = _fallback.ac_eg_minimize(
            p, W, R0, s, coef, 0.1, 1e-12, 5000, 1e-12
        )
        assert J <= J0 and converged
        assert np.allclose(R.sum(axis=1), 1.0, atol=1e-12)

    def test_grid_scan_finds_boundary_minimum(self):
        # independent channel at alpha=2: optimum r equals the prior for both outputs
        p = np.array([0.9, 0.1])
        W = np.array([[0.3, 0.7], [0.3, 0.7]])
        g = np.linspace(0, 1, 1001)
        val, i, j = _fallback.ac_grid_scan(p, W, 0.5, -2.0, g, g)
        assert g[i] == pytest.approx(0.9, abs=2e-3)
        assert g[j] == pytest.approx(0.9, abs=2e-3)


@needs_compiled
class TestBackendEquivalence:
    @pytest.mark.parametrize(
        "alpha,rel",
        # near order 1 the huge prefactor amplifies summation-order noise
        [(0.5, 1e-12), (2.0, 1e-12), (1.0 + 1e-6, 1e-9)],
    )
    def test_objective_identical(self, alpha, rel):
        s, coef = 1 - 1 / alpha, alpha / (1 - alpha)
        for seed in range(25):
            p, W = instance(seed, 3, 4)
            R = np.random.default_rng(seed + 50).dirichlet(np.ones(3), size=4)
            a = _ac.ac_objective(p, W, R, s, coef)
            b = _fallback.ac_objective(p, W, R, s, coef)
            assert a == pytest.approx(b, rel=rel, abs=rel)

    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_eg_minimize_agree(self, alpha):
        s, coef = 1 - 1 / alpha, alpha / (1 - alpha)
        for seed in range(10):
            p, W = instance(seed, 2, 3)
            R0 = np.random.default_rng(seed).dirichlet(np.ones(2), size=3)
            Ja, _, _, _ = _ac.ac_eg_minimize(p, W, R0, s, coef, 0.1, 1e-12, 10_000, 1e-12)
            Jb, _, _, _ = _fallback.ac_eg_minimize(p, W, R0, s, coef, 0.1, 1e-12, 10_000, 1e-12)
            assert Ja == pytest.approx(Jb, abs=1e-9)

    def test_grid_scan_identical_indices(self):
        g = np.linspace(0, 1, 501)
        for seed in range(10):
            p, W = instance(seed)
            for alpha in (0.5, 2.0):
                s, coef = 1 - 1 / alpha, alpha / (1 - alpha)
                va, ia, ja = _ac.ac_grid_scan(p, W, s, coef, g, g)
                vb, ib, jb = _fallback.ac_grid_scan(p, W, s, coef, g, g)
                assert (ia, ja) == (ib, jb)
                assert va == pytest.approx(vb, rel=1e-12)


class TestBackendSelection:
    def test_backend_reported(self):
        assert kernels.BACKEND in ("compiled", "python")

    def test_get_backend(self):
        assert kernels.get_backend("python") is _fallback
        with pytest.raises(ValueError):
            kernels.get_backend("rust")
