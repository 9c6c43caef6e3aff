import math

import numpy as np
import pytest

from skewcarleson.errors import EvaluationError, ParameterError
from skewcarleson.kernels import KernelParams, bergman_kernel
from skewcarleson.quadrature import ball_rule, disk_rule, integrate, monte_carlo_oracle


def test_disk_area(rule):
    est, err = integrate(rule, lambda z: np.ones(z.shape[0]))
    assert est == pytest.approx(math.pi, abs=1e-10)
    assert err < 1e-10


def test_weighted_area(rule):
    est, _ = integrate(rule, lambda z: np.ones(z.shape[0]), 1.0)
    assert est == pytest.approx(math.pi / 2, abs=1e-12)


def test_kernel_square_integral(rule):
    kp = KernelParams(1, 0.0)
    a = np.array([0.9])
    est, _ = integrate(rule.centered(a), lambda w: np.abs(bergman_kernel(kp, w, a)) ** 2)
    assert est == pytest.approx(1 / (math.pi * 0.19 ** 2), rel=1e-10)
    assert est == pytest.approx(8.8174, abs=1e-4)


def test_weights_positive_nodes_inside(rule):
    assert np.all(rule.weights > 0)
    assert np.all(np.abs(rule.nodes) < 1)
    assert np.sum(rule.weights) == pytest.approx(math.pi, rel=1e-12)


def test_ball_rule_volume():
    r = ball_rule(2, 2 ** 12)
    assert np.sum(r.weights) == pytest.approx(math.pi ** 2 / 2, rel=1e-12)
    assert np.all(np.sum(np.abs(r.nodes) ** 2, axis=1) < 1)


def test_ball_rule_weighted_integral():
    est, err = integrate(ball_rule(2), lambda z: np.ones(z.shape[0]), 1.0)
    assert abs(est - math.pi ** 2 / 6) <= max(3 * err, 1e-6)


def test_weight_identity(rule):
    f = lambda z: np.cos(z[:, 0].real) + np.abs(z[:, 0]) ** 3
    a, _ = integrate(rule, f, 0.7)
    b, _ = integrate(rule, lambda z: f(z) * (1 - np.abs(z[:, 0]) ** 2) ** 0.7, 0.0)
    assert a == pytest.approx(b, rel=1e-10)


def test_invalid_weight(rule):
    with pytest.raises(ParameterError):
        integrate(rule, lambda z: np.ones(z.shape[0]), -1.0)


def test_non_finite_names_node(rule):
    with pytest.raises(EvaluationError, match="node"):
        integrate(rule, lambda z: np.where(np.abs(z[:, 0]) > 0.5, np.nan, 1.0))


def test_grading_order():
    # (1-|z|^2)^{-1/2} integrates to 2 pi; without grading the radial error is O(1/N)
    f = lambda z: (1 - np.abs(z[:, 0]) ** 2) ** -0.5
    errs = [abs(integrate(disk_rule(m, 8, grading=1.0), f)[0] - 2 * math.pi) for m in (16, 32, 64)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.1)
    graded = abs(integrate(disk_rule(16, 8), f)[0] - 2 * math.pi)
    assert graded < 1e-12


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_deterministic_vs_monte_carlo(rule, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=3)
    alpha = rng.uniform(0, 2)
    f = lambda z: np.abs(c[0] + c[1] * z[:, 0] + c[2] * z[:, 0] ** 2) ** 2
    det, _ = integrate(rule, f, alpha)
    est, se = monte_carlo_oracle(f, alpha, 400_000, seed)
    assert abs(det - est) <= 3 * se


def test_monte_carlo_oracle_simple():
    est, se = monte_carlo_oracle(lambda z: np.ones(z.shape[0]), 0.0, 10_000, 1)
    assert abs(est - math.pi) <= 3 * se + 1e-12
    est, se = monte_carlo_oracle(lambda z: np.abs(z[:, 0]) ** 2, 0.0, 200_000, 2)
    assert abs(est - math.pi / 2) <= 3 * se


def test_monte_carlo_needs_samples():
    with pytest.raises(ParameterError):
        monte_carlo_oracle(lambda z: 1.0, 0.0, 10)


def test_centered_rule_exact_for_invariant_integrals(rule):
    # int |k_a|^2 dnu = 1 becomes a smooth integrand after the pullback
    kp = KernelParams(1, 0.0)
    for a in (0.99, 0.999 * np.exp(1j)):
        aa = np.array([a])
        est, _ = integrate(rule.centered(aa),
                           lambda w: np.abs(bergman_kernel(kp, w, aa)) ** 2 * (1 - abs(a) ** 2) ** 2 * math.pi)
        assert est == pytest.approx(1.0, abs=1e-9)
