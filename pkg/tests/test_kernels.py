import math

import numpy as np
import pytest
from scipy.special import gammaln

from skewcarleson.errors import ParameterError
from skewcarleson.fitting import loglog_fit
from skewcarleson.geometry import KobayashiBall, radial_grid, radius_for_delta
from skewcarleson.kernels import (
    KernelParams,
    KernelSum,
    Polynomial,
    SpaceParams,
    bergman_kernel,
    bergman_project,
    duality_pairing,
    kernel_diagonal,
    kernel_gram,
    kernel_integral_estimate,
    kernel_norm,
    norm,
    normalized_kernel,
    pairing_exponent,
    theorem_exponent,
)
from skewcarleson.quadrature import ball_rule, integrate


def _gamma_constant(n, beta):
    return math.exp(gammaln(n + beta + 1) - n * math.log(math.pi) - gammaln(beta + 1))


class TestConstants:
    def test_disk_unweighted(self):
        assert bergman_kernel(KernelParams(1, 0.0), 0.0, 0.0) == pytest.approx(1 / math.pi, rel=1e-12)

    def test_disk_weighted(self):
        assert bergman_kernel(KernelParams(1, 1.0), 0.0, 0.0) == pytest.approx(2 / math.pi, rel=1e-12)

    @pytest.mark.parametrize("n,beta", [(1, 0.5), (2, 0.0), (2, 1.5), (3, 0.25)])
    def test_constant_matches_gamma_formula(self, n, beta):
        assert KernelParams(n, beta).constant == pytest.approx(_gamma_constant(n, beta), rel=1e-12)

    def test_constant_reproduces_one(self, rule):
        # K(0, .) = c is constant, so P_beta 1 (0) = c * nu_beta(D) must equal 1
        for beta in (0.0, 0.5, 2.0):
            kp = KernelParams(1, beta)
            est, _ = integrate(rule, lambda w: np.full(w.shape[0], kp.constant), beta)
            assert est == pytest.approx(1.0, abs=1e-12)

    def test_invalid_beta(self):
        with pytest.raises(ParameterError):
            KernelParams(1, -1.0)

    def test_invalid_space(self):
        with pytest.raises(ParameterError):
            SpaceParams(0.0, 0.0)
        with pytest.raises(ParameterError):
            SpaceParams(2.0, -1.5)


class TestKernel:
    def test_hermitian(self, rng):
        kp = KernelParams(2, 0.7)
        z = 0.5 * (rng.standard_normal((30, 2)) + 1j * rng.standard_normal((30, 2))) / 2
        w = 0.5 * (rng.standard_normal((30, 2)) + 1j * rng.standard_normal((30, 2))) / 2
        assert np.allclose(bergman_kernel(kp, z, w), np.conj(bergman_kernel(kp, w, z)), rtol=1e-13)

    def test_holomorphic_in_first_variable(self, rng):
        kp = KernelParams(1, 0.5)
        a = np.array([0.6 + 0.3j])
        h = 1e-6
        for z in 0.5 * np.exp(2j * np.pi * rng.random(10)) * rng.random(10):
            fx = (bergman_kernel(kp, z + h, a) - bergman_kernel(kp, z - h, a)) / (2 * h)
            fy = (bergman_kernel(kp, z + 1j * h, a) - bergman_kernel(kp, z - 1j * h, a)) / (2 * h)
            # Cauchy-Riemann: d/d(zbar) = (f_x + i f_y) / 2 vanishes
            assert abs(0.5 * (fx + 1j * fy)) < 1e-6

    def test_diagonal_exponent(self):
        z = radial_grid(1, 1e-3, 20)
        d = 1 - np.abs(z[:, 0]) ** 2
        for beta in (0.0, 1.0):
            fit = loglog_fit(d, kernel_diagonal(KernelParams(1, beta), z))
            assert fit.slope == pytest.approx(-(2 + beta), abs=0.02)

    def test_normalized_at_origin(self):
        z = np.array([0.1, 0.5j, -0.7])
        vals = normalized_kernel(KernelParams(1, 0.0), 0.0, z)
        assert np.allclose(vals, 1 / math.sqrt(math.pi))

    @pytest.mark.parametrize("a,beta", [(0.9, 0.5), (0.99, 0.0), (0.5j, 1.0)])
    def test_normalized_norm(self, rule, a, beta):
        kp = KernelParams(1, beta)
        est, _ = integrate(rule.centered([a]), lambda w: np.abs(normalized_kernel(kp, a, w)) ** 2, beta)
        assert math.sqrt(est) == pytest.approx(1.0, abs=1e-6)
        assert norm(lambda w: normalized_kernel(kp, a, w), SpaceParams(2, beta), rule.centered([a])) == \
            pytest.approx(1.0, abs=1e-6)

    def test_normalized_diagonal_two_sided(self):
        for beta in (0.0, 1.0):
            kp = KernelParams(1, beta)
            a = radius_for_delta(np.geomspace(0.1, 1e-4, 15))
            ratio = np.abs(normalized_kernel(kp, a[:, None], a[:, None])) ** 2 * (1 - a ** 2) ** kp.order
            assert np.ptp(ratio) < 1e-9 * ratio.max()

    def test_ball_bound(self, rng):
        r = 0.5
        kp = KernelParams(1, 0.5)
        b = kp.order
        for a in radius_for_delta(np.geomspace(0.1, 1e-3, 8)):
            pts = KobayashiBall([a], r).sample(100, rng)
            ratio = np.abs(bergman_kernel(kp, pts, np.array([a]))) * (1 - a * a) ** b
            assert ratio.min() >= kp.constant * (1 - r) ** b
            assert ratio.max() <= kp.constant * (1 + r) ** b


class TestKernelIntegral:
    def test_reproducing_value(self, rule):
        kp = KernelParams(1, 0.0)
        exact = 1 / (math.pi * 0.19 ** 2)
        assert kernel_integral_estimate(kp, [0.9], 2, 0.0) == pytest.approx(exact, rel=1e-12)
        assert kernel_integral_estimate(kp, [0.9], 2, 0.0, rule) == pytest.approx(exact, rel=1e-8)

    @pytest.mark.parametrize("p,alpha,beta", [(2, 0, 0), (2, 1, 0), (3, 0, 1), (1.5, 0.5, 0.5)])
    def test_slope(self, rule, p, alpha, beta):
        kp = KernelParams(1, beta)
        z = radial_grid(1, 1e-3, 13)
        d = 1 - np.abs(z[:, 0]) ** 2
        vals = [kernel_integral_estimate(kp, zz, p, alpha, rule) for zz in z]
        assert loglog_fit(d, vals).slope == pytest.approx(theorem_exponent(kp, p, alpha), abs=0.05)

    def test_quadrature_matches_closed_form(self, rule):
        kp = KernelParams(1, 0.5)
        for z0 in (0.0, 0.5, 0.99):
            q = kernel_integral_estimate(kp, [z0], 2.5, 0.3, rule)
            c = kernel_integral_estimate(kp, [z0], 2.5, 0.3)
            assert q == pytest.approx(c, rel=1e-2)

    def test_origin_finite(self):
        v = kernel_integral_estimate(KernelParams(1, 0.0), [0.0], 3.0, 0.5)
        assert 0 < v < math.inf

    def test_condition_violated(self):
        with pytest.raises(ParameterError, match="alpha"):
            kernel_integral_estimate(KernelParams(1, 0.0), [0.5], 1.0, 0.5)

    def test_kernel_norm_slope(self):
        kp = KernelParams(1, 0.0)
        a = radial_grid(1, 1e-3, 13)
        d = 1 - np.abs(a[:, 0]) ** 2
        for p, alpha in ((2, 0.5), (3, 0.0)):
            vals = [kernel_norm(kp, x, SpaceParams(p, alpha)) ** p for x in a]
            assert loglog_fit(d, vals).slope == pytest.approx(2 + alpha - 2 * p, abs=0.05)


class TestProjection:
    def test_constants(self, rule):
        for beta in (0.0, 1.0, 3.0):
            v = bergman_project(KernelParams(1, beta), lambda w: np.ones(w.shape[0]), [0.5], rule)
            assert v == pytest.approx(1.0, abs=1e-6)

    def test_square(self, rule):
        z = 0.3 + 0.2j
        assert bergman_project(KernelParams(1, 0.0), lambda w: w[:, 0] ** 2, [z], rule) == \
            pytest.approx(z * z, abs=1e-6)

    def test_antiholomorphic(self, rule):
        assert abs(bergman_project(KernelParams(1, 0.0), lambda w: np.conj(w[:, 0]), [0.0], rule)) < 1e-12

    @pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.0])
    def test_reproducing_monomials(self, rule, rng, beta):
        kp = KernelParams(1, beta)
        z = (0.9 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20)))
        for m in range(6):
            f = Polynomial.monomial(1, m)
            got = bergman_project(kp, f, z, rule)
            assert np.max(np.abs(got - z ** m)) < 1e-6 * max(1e-300, np.min(np.abs(z ** m))) + 1e-12

    def test_ball_projection(self):
        kp = KernelParams(2, 0.0)
        f = Polynomial(2, {(1, 1): 1.0, (0, 0): 2.0})
        z = np.array([0.3, -0.2j])
        got = bergman_project(kp, f, z, ball_rule(2, 2 ** 15))
        assert got == pytest.approx(f(z), abs=5e-3)


class TestPairing:
    def test_normalized_kernel_pairing(self, rule):
        kp = KernelParams(1, 0.5)
        k0 = lambda w: normalized_kernel(kp, 0.0, w)
        assert duality_pairing(k0, k0, 0.5, rule) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_monomials(self, rule):
        v = duality_pairing(Polynomial.monomial(1, 2), Polynomial.monomial(1, 3), 0.0, rule)
        assert abs(v) < 1e-8

    def test_exponent_pair(self):
        p_dual, a_dual = pairing_exponent(3.0, 0.6, 1.0)
        assert p_dual == pytest.approx(1.5)
        assert 0.6 / 3 + a_dual / p_dual == pytest.approx(1.0)

    def test_p_at_most_one(self, rule):
        with pytest.raises(ParameterError, match="conjugate"):
            pairing_exponent(1.0, 0.0, 0.0)
        with pytest.raises(ParameterError):
            duality_pairing(lambda w: w[:, 0], lambda w: w[:, 0], 0.0, rule, space=SpaceParams(0.5, 0.0))


class TestNorms:
    def test_constant(self, rule):
        assert norm(lambda w: np.ones(w.shape[0]), SpaceParams(2, 0.0), rule) == pytest.approx(math.sqrt(math.pi))

    def test_gram_matches_quadrature(self, rule):
        kp = KernelParams(1, 1.0)
        a = np.array([[0.3], [0.5j]])
        b = np.array([[-0.4 + 0.1j]])
        g = kernel_gram(kp, a, b, 0.5)
        est, _ = integrate(rule, lambda w: bergman_kernel(kp, w, a[0]) * np.conj(bergman_kernel(kp, w, b[0])), 0.5)
        assert g[0, 0] == pytest.approx(est, rel=1e-9)

    def test_kernel_sum_evaluation(self):
        kp = KernelParams(1, 0.0)
        f = KernelSum(kp, [[0.2], [0.4j]], [1.0, 2.0])
        z = np.array([0.1])
        assert f(z) == pytest.approx(bergman_kernel(kp, z, [0.2]) + 2 * bergman_kernel(kp, z, [0.4j]))
