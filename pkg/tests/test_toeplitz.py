import math

import numpy as np
import pytest

from skewcarleson.errors import BranchError, DivergenceError, HypothesisWarning, ParameterError
from skewcarleson.fitting import FIT_WINDOW, envelope_fit
from skewcarleson.geometry import radial_point, radius_for_delta
from skewcarleson.kernels import KernelParams, KernelSum, Polynomial, SpaceParams, bergman_kernel
from skewcarleson.quadrature import disk_rule, integrate
from skewcarleson.measures import CarlesonParams, Measure, classify_skew_carleson, skew_carleson_norm
from skewcarleson.toeplitz import (
    TestFunctionFamily as Family,
    adjoint_identity_defect,
    apply_toeplitz,
    compactness_probe,
    derive_params,
    estimate_operator_norm,
    image_norm,
    lower_bound_probe,
    radial_multiplier,
    radial_norm_exact,
)

NU = Measure.radial(0.0)
OP = derive_params(2, 0, 2, 0, 0)


class TestParams:
    def test_equal_spaces(self):
        op = derive_params(2, 0, 2, 0, 1)
        assert op.lam == 1.0 and op.gamma == 1.0
        assert op.hypothesis_ok

    def test_classical_regime(self):
        op = derive_params(1, 0, 2, 0, 0)
        assert op.lam == pytest.approx(1.5) and op.gamma == 0.0
        # (1 + alpha)/p = 1 with n max(1, 1/p) = 1 gives 2 > 2: fails for the source
        assert op.hypothesis == (False, True)
        assert "hypothesis violated" in op.banner

    def test_mixed(self):
        op = derive_params(2, 1, 3, 2, 1)
        assert op.lam == pytest.approx(7 / 6) and op.gamma == pytest.approx(5 / 7)

    def test_identity_defect(self):
        assert derive_params(1.3, 0.4, 2.7, -0.2, 0.9, n=3).exponent_identity_defect() == pytest.approx(0, abs=1e-13)

    def test_lam_zero(self):
        op = derive_params(0.5, 0, 1 / 3, 0, 0)
        assert op.lam == pytest.approx(0.0, abs=1e-15) or op.gamma is None

    def test_invalid(self):
        with pytest.raises(ParameterError):
            derive_params(0, 0, 2, 0, 0)
        with pytest.raises(ParameterError):
            derive_params(2, -1, 2, 0, 0)

    def test_atom_tau(self):
        op = derive_params(3, 0.5, 2, 0, 1)
        assert Family.atom_tau(op) == pytest.approx(1.5 - 2.5 / 3)


class TestApply:
    def test_identity_on_polynomials(self, rule):
        f = Polynomial(1, {(0,): 1.0, (3,): 2.0 - 1j, (5,): 0.5})
        z = np.array([0.1, 0.5j, -0.8 + 0.1j])
        for beta in (0.5, 1.0):
            got = apply_toeplitz(Measure.radial(beta), beta, f, z)
            assert np.allclose(got, f(z), atol=1e-12)
            got_q = apply_toeplitz(Measure.radial(beta), beta, lambda w: f(w), z, rule)
            assert np.allclose(got_q, f(z), atol=1e-6)

    def test_unit_atom(self):
        a = 0.4 - 0.3j
        z = np.array([0.0, 0.7j])
        got = apply_toeplitz(Measure.atomic([[a]], [1.0]), 1.0, lambda w: np.ones(w.shape[0]), z)
        assert np.allclose(got, bergman_kernel(KernelParams(1, 1.0), z, np.array([a])))

    def test_nu_constant(self):
        assert apply_toeplitz(NU, 0.0, Polynomial.monomial(1, 0), 0.0) == pytest.approx(1.0)

    def test_kernel_image_matches_quadrature(self, rule):
        kp = KernelParams(1, 0.5)
        f = KernelSum(kp, [[0.6j]])
        mu = Measure.radial(0.3)
        z = np.array([0.2, -0.5])
        exact = apply_toeplitz(mu, 0.5, f, z)
        quad = apply_toeplitz(mu, 0.5, lambda w: f(w), z, rule)
        assert np.allclose(exact, quad, rtol=1e-8)

    def test_divergent_integrand(self, rule):
        with pytest.raises(DivergenceError):
            apply_toeplitz(NU, 0.0, lambda w: np.where(np.abs(w[:, 0]) < 0.3, np.inf, 1.0), [0.1], rule)
        with pytest.raises(DivergenceError):
            apply_toeplitz(Measure.atomic([[0.5]], [1.0]), 0.0, lambda w: np.full(w.shape[0], np.nan), [0.1])

    def test_linearity(self, rng):
        m1 = Measure.atomic([[0.3], [0.8j]], [1.0, 2.0])
        m2 = Measure.atomic([[-0.5]], [0.7])
        both = Measure.atomic([[0.3], [0.8j], [-0.5]], [3.0, 6.0, -1.4 * -1])
        f = Polynomial(1, {(1,): 1.0, (2,): 1j})
        z = np.array([0.1, 0.4 + 0.4j])
        lhs = apply_toeplitz(both, 0.5, f, z)
        rhs = 3 * apply_toeplitz(m1, 0.5, f, z) + 2 * apply_toeplitz(m2, 0.5, f, z)
        assert np.array_equal(np.round(lhs - rhs, 12), np.zeros(2))

    def test_adjoint_identity(self, rule):
        mu = Measure.atomic([[0.3], [0.6 - 0.2j], [-0.1j]], [1.0, 0.5, 2.0])
        f = Polynomial(1, {(1,): 1.0, (2,): 0.5})
        h = Polynomial(1, {(0,): 1.0, (3,): 1j})
        assert adjoint_identity_defect(mu, 0.5, f, h, rule) < 1e-8

    def test_multiplier(self):
        assert radial_multiplier(Measure.radial(1.0), 1.0, np.arange(5)) == pytest.approx(np.ones(5))
        with pytest.raises(ParameterError):
            radial_multiplier(Measure.atomic([[0.1]], [1.0]), 0.0, 1)


class TestLowerBound:
    def _sweep(self, mu):
        deltas = np.geomspace(0.1, 1e-3, 13)
        vals = [lower_bound_probe(mu, OP, a).probe for a in radial_point(1, radius_for_delta(deltas))]
        return envelope_fit(deltas, vals, FIT_WINDOW), vals

    def test_nu_bounded(self):
        fit, vals = self._sweep(NU)
        assert fit.slope == pytest.approx(0.0, abs=0.1)
        assert max(vals) < 2

    def test_singular_grows(self):
        fit, _ = self._sweep(Measure.radial(-0.5))
        assert fit.slope == pytest.approx(-0.5, abs=0.1)

    def test_zero(self):
        assert lower_bound_probe(Measure.zero(), OP, [0.99]).probe == 0.0

    def test_branch_error(self):
        with pytest.raises(BranchError, match="lattice"):
            lower_bound_probe(NU, derive_params(2, 0, 1, 0, 0), [0.99])

    def test_interior_center_rejected(self):
        with pytest.raises(ParameterError):
            lower_bound_probe(NU, OP, [0.5])


class TestEstimate:
    def test_identity(self):
        est = estimate_operator_norm(Measure.radial(1.0), derive_params(2, 1, 2, 1, 1))
        assert 1 - 1e-4 <= est.value <= 1.0 + 1e-12

    def test_nu_against_skew_norm(self):
        est = estimate_operator_norm(NU, OP)
        norm_value, _ = skew_carleson_norm(NU, CarlesonParams(1.0, 0.0))
        assert 1e-2 <= est.value / norm_value <= 1e2

    def test_linearity(self):
        mu = Measure.boundary_atoms(2.0, kmax=8)
        full = estimate_operator_norm(mu, OP, trials=2).value
        half = estimate_operator_norm(mu.scaled(0.5), OP, trials=2).value
        assert half == pytest.approx(0.5 * full, rel=1e-12)

    def test_exact_norm_dominates(self):
        mu = Measure.radial(0.5)
        assert estimate_operator_norm(mu, OP).value <= radial_norm_exact(mu, OP) * (1 + 1e-12)

    def test_hypothesis_warning(self):
        with pytest.warns(HypothesisWarning):
            estimate_operator_norm(NU, derive_params(1, 0, 2, 0, 0), family=Family("kernel_probe"))

    def test_p_not_two(self):
        op = derive_params(2, 0, 4, 0, 1)
        est = estimate_operator_norm(Measure.radial(1.5), op, trials=1)
        assert est.fit.slope == pytest.approx(0.0, abs=0.1)
        assert math.isfinite(est.value)

    def test_zero_measure(self):
        est = estimate_operator_norm(Measure.zero(), OP)
        assert est.value == 0.0

    def test_image_norm_series_vs_quadrature(self, rule):
        kp = KernelParams(1, 0.0)
        f = KernelSum(kp, [[0.7]])
        mu = Measure.radial(0.5)
        series = image_norm(mu, 0.0, f, SpaceParams(2, 0.0))
        local = rule.centered([0.7])
        est, _ = integrate(local, lambda w: np.abs(apply_toeplitz(mu, 0.0, f, w)) ** 2)
        assert series == pytest.approx(math.sqrt(est), rel=1e-6)

    def test_image_norm_generic_callable(self):
        mu = Measure.radial(1.0)
        f = Polynomial.monomial(1, 2)
        coarse = disk_rule(24, 64)
        generic = image_norm(mu, 1.0, lambda w: f(w), SpaceParams(2, 1.0), coarse)
        # the inner Toeplitz integral uses the default rule, which limits accuracy near the circle
        assert generic == pytest.approx(image_norm(mu, 1.0, f, SpaceParams(2, 1.0)), rel=1e-2)


class TestCompactness:
    def test_vanishing(self):
        res = compactness_probe(Measure.radial(0.5), OP)
        assert res.slope == pytest.approx(0.5, abs=0.1)
        assert res.verdict == "vanishing" == classify_skew_carleson(Measure.radial(0.5), CarlesonParams(1.0, 0.0)).verdict

    def test_not_vanishing(self):
        res = compactness_probe(NU, OP)
        assert res.slope == pytest.approx(0.0, abs=0.1)
        assert res.verdict == "carleson"

    def test_compact_support(self):
        mu = Measure.atomic([[0.2], [0.5j]], [1.0, 1.0])
        res = compactness_probe(mu, OP)
        expo = Family.vanishing_exponent(OP)
        assert res.slope >= expo - 0.1
        assert res.verdict == "vanishing"

    def test_too_few_centers(self):
        res = compactness_probe(NU, OP, centers=radial_point(1, radius_for_delta([0.05, 0.01])))
        assert res.verdict == "inconclusive"
