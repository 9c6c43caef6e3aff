import math
import warnings

import numpy as np
import pytest

from skewcarleson.errors import BoundaryGrowthWarning, ParameterError
from skewcarleson.geometry import cached_lattice, radial_grid, radius_for_delta, unweighted_ball_volume
from skewcarleson.kernels import KernelParams, normalized_kernel
from skewcarleson.measures import (
    CarlesonParams,
    Measure,
    ProductFactor,
    ball_mass,
    berezin_diagnostic,
    berezin_level,
    berezin_transform,
    classify_skew_carleson,
    lattice_diagnostic,
    mu_hat,
    product_carleson_test,
    reweight,
    skew_carleson_diagnostic,
    skew_carleson_norm,
)

NU = Measure.radial(0.0)
BALL_09 = math.pi * 0.25 * 0.19 ** 2 / (1 - 0.25 * 0.81) ** 2


class TestMeasure:
    def test_atomic_mass(self):
        mu = Measure.atomic([[0.3], [0.5j]], [2.0, 0.5])
        assert mu.total_mass == pytest.approx(2.5)

    def test_radial_mass(self):
        assert Measure.radial(1.0).total_mass == pytest.approx(math.pi / 2, rel=1e-12)
        assert Measure.radial(0.5, 3.0, n=2).total_mass == pytest.approx(
            3.0 * math.pi ** 2 * math.gamma(1.5) / math.gamma(3.5), rel=1e-12)

    def test_nonpositive_weight(self):
        with pytest.raises(ParameterError):
            Measure.atomic([[0.3]], [0.0])

    def test_non_integrable_density(self):
        with pytest.raises(ParameterError):
            Measure.radial(-1.0)

    def test_boundary_atoms_weights(self):
        mu = Measure.boundary_atoms(2.0, kmax=6)
        d = 1 - np.abs(mu.points[:, 0]) ** 2
        assert np.allclose(mu.weights, d ** 2)

    def test_lattice_power(self):
        lat = cached_lattice(1, "smooth", 0.5, 0.05)
        mu = Measure.lattice_power(lat, 2.0)
        assert mu.kind == "lattice_weighted" and mu.weights.size == len(lat)


class TestBallMass:
    def test_atom_inside(self):
        mu = Measure.atomic([[0.3]], [2.0])
        assert ball_mass(mu, [0.0], 0.5) == 2.0
        assert ball_mass(mu, [0.0], 0.2) == 0.0

    def test_nu_matches_volume(self):
        assert ball_mass(NU, [0.9], 0.5) == pytest.approx(BALL_09, rel=1e-12)

    def test_mu_hat_nu(self):
        z = radial_grid(1, 1e-3, 7)
        assert np.allclose(mu_hat(NU, z, 0.5, 1.0), 1.0)
        assert mu_hat(NU, [0.9], 0.5, 1.5) == pytest.approx(BALL_09 ** -0.5, rel=1e-12)
        assert mu_hat(NU, [0.9], 0.5, 1.5) == pytest.approx(4.736, abs=1e-3)

    def test_mu_hat_zero(self):
        assert mu_hat(Measure.zero(), [0.4], 0.5, 2.0) == 0.0

    def test_theta_identity(self, rng):
        mu = Measure.radial(0.7)
        z = 0.95 * rng.random(10)[:, None]
        lhs = mu_hat(mu, z, 0.4, 1.8)
        rhs = unweighted_ball_volume(1, z, 0.4) ** (1 - 1.8) * mu_hat(mu, z, 0.4, 1.0)
        assert np.allclose(lhs, rhs, rtol=1e-13)


class TestBerezin:
    def test_nu_level_two(self, rule):
        z = radius_for_delta(np.geomspace(1, 1e-3, 10))
        assert np.allclose(berezin_transform(NU, z, 2.0), 1.0, atol=1e-10)
        assert np.allclose(berezin_transform(NU, z, 2.0, rule=rule), 1.0, atol=1e-8)

    def test_atom(self):
        a = 0.6 + 0.1j
        mu = Measure.atomic([[a]], [1.0])
        z = np.array([0.2, -0.5j])
        k = normalized_kernel(KernelParams(1, 0.0), z[:, None], np.array([a]))
        for s in (1.0, 2.0, 3.5):
            assert np.allclose(berezin_transform(mu, z, s), np.abs(k) ** s, rtol=1e-12)

    def test_level_four_slope(self, quiet):
        z = radial_grid(1, 1e-3, 13)
        d = 1 - np.abs(z[:, 0]) ** 2
        from skewcarleson.fitting import loglog_fit
        assert loglog_fit(d, berezin_transform(NU, z, 4.0)).slope == pytest.approx(-2.0, abs=0.1)

    def test_growth_warning(self):
        with pytest.warns(BoundaryGrowthWarning):
            berezin_transform(NU, [0.5], 4.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error", BoundaryGrowthWarning)
            berezin_transform(NU, [0.5], 2.0)

    def test_default_level(self):
        assert berezin_level(CarlesonParams(1.0, 0.0)) == 2
        assert berezin_level(CarlesonParams(1.5, 0.5)) == 4
        assert berezin_level(CarlesonParams(0.75, 0.0)) == 2


class TestSkewNorm:
    def test_nu_stable(self):
        cp = CarlesonParams(1.0, 0.0)
        values = [skew_carleson_norm(NU, cp, eps=eps)[0] for eps in (1e-2, 1e-3, 1e-4)]
        assert np.ptp(values) < 1e-9

    def test_nu_growth(self):
        cp = CarlesonParams(1.0, 0.5)
        (v1, d1), (v2, d2) = skew_carleson_norm(NU, cp, eps=1e-2), skew_carleson_norm(NU, cp, eps=1e-4)
        assert math.log(v2 / v1) / math.log(d2 / d1) == pytest.approx(-0.5, abs=0.1)

    @pytest.mark.parametrize("lam,gamma", [(1.0, 0.5), (1.5, 0.0), (2.0, 1.0)])
    def test_threshold(self, lam, gamma):
        t = (2 + gamma) * lam - 2
        diag = skew_carleson_diagnostic(Measure.radial(t), CarlesonParams(lam, gamma))
        assert diag.fit.slope == pytest.approx(0.0, abs=0.1)
        assert diag.verdict == "carleson"

    def test_lam_zero(self):
        with pytest.raises(ParameterError):
            skew_carleson_norm(NU, CarlesonParams(0.0, 0.5))
        assert skew_carleson_diagnostic(NU, CarlesonParams(0.0, None)).verdict == "no_verdict"


class TestClassify:
    @pytest.mark.parametrize("t,verdict", [(0.0, "carleson"), (0.5, "vanishing"), (-0.5, "not_carleson")])
    @pytest.mark.parametrize("r", [0.3, 0.5, 0.7])
    def test_ground_truth(self, t, verdict, r):
        diag = classify_skew_carleson(Measure.radial(t), CarlesonParams(1.0, 0.0, r))
        assert diag.verdict == verdict
        assert diag.fit.slope == pytest.approx(t, abs=0.1)

    def test_shallow_grid_inconclusive(self):
        diag = classify_skew_carleson(NU, CarlesonParams(1.0, 0.0), eps=0.05)
        assert diag.verdict == "inconclusive"
        assert diag.deepest >= 0.05 * 0.999

    def test_zero_measure(self):
        assert classify_skew_carleson(Measure.zero(), CarlesonParams(1.0, 0.0)).verdict == "vanishing"

    def test_compact_support_vanishes(self):
        mu = Measure.atomic([[0.2], [0.5j]], [1.0, 1.0])
        assert classify_skew_carleson(mu, CarlesonParams(1.0, 0.0)).verdict == "vanishing"

    @pytest.mark.parametrize("s,verdict", [(1.5, "not_carleson"), (2.0, "carleson"), (2.5, "vanishing")])
    def test_boundary_atoms(self, s, verdict):
        mu = Measure.boundary_atoms(s)
        cp = CarlesonParams(1.0, 0.0)
        assert classify_skew_carleson(mu, cp).verdict == verdict
        assert berezin_diagnostic(mu, cp).verdict == verdict

    def test_evidence_present(self):
        summary = classify_skew_carleson(NU, CarlesonParams(1.0, 0.0)).summary()
        for key in ("slope", "residual", "deepest_delta", "verdict", "fit_points"):
            assert key in summary


class TestCrossDiagnostics:
    @pytest.mark.parametrize("t", [0.25, 0.75])
    def test_integral_branch_lattice_comparable(self, t):
        cp = CarlesonParams(0.75, 0.0)
        mu = Measure.radial(t)
        lat = cached_lattice(1, "smooth", 0.5, 1e-3)
        cont = skew_carleson_diagnostic(mu, cp)
        disc = lattice_diagnostic(mu, cp, lat)
        assert cont.verdict == disc.verdict == "vanishing"
        assert 0.1 <= disc.value / cont.value <= 10

    def test_berezin_level_too_low(self):
        with pytest.raises(ParameterError):
            berezin_diagnostic(NU, CarlesonParams(1.5, 0.0), s=1.0)


class TestReweight:
    def test_identity(self):
        assert reweight(NU, 0.0) is NU

    def test_nu(self):
        mu = reweight(NU, 1.0)
        assert mu.exponent == 1.0
        assert classify_skew_carleson(mu, CarlesonParams(1.0, 1.0)).verdict == "carleson"

    def test_atomic(self):
        mu = Measure.atomic([[0.5], [0.9j]], [1.0, 3.0])
        out = reweight(mu, 1.0)
        assert np.allclose(out.weights, [0.75, 3.0 * 0.19])

    def test_non_integrable(self):
        with pytest.raises(ParameterError):
            reweight(Measure.radial(-0.5), -0.6)

    @pytest.mark.parametrize("beta", [0.5, 1.0])
    def test_norm_ratio(self, beta):
        for mu in (Measure.radial(0.0), Measure.boundary_atoms(2.0)):
            base = skew_carleson_diagnostic(mu, CarlesonParams(1.0, 0.0)).value
            new = skew_carleson_diagnostic(reweight(mu, beta), CarlesonParams(1.0, beta)).value
            assert 0.1 <= new / base <= 10


class TestProduct:
    def test_single_constant(self):
        res = product_carleson_test(NU, [ProductFactor(2, 0, 2)])
        assert res.constant_ratio == pytest.approx(1.0)
        assert res.bounded

    def test_two_factors_nu(self):
        # lam = 2, gamma = 0: mu_hat_{r,2} = 1/nu(B) is unbounded, so nu fails this class
        res = product_carleson_test(NU, [ProductFactor(2, 0, 2), ProductFactor(2, 0, 2)])
        assert (res.lam, res.gamma) == (2.0, 0.0)
        assert not res.bounded
        assert classify_skew_carleson(NU, CarlesonParams(2.0, 0.0)).verdict == "not_carleson"

    def test_growth_for_singular_density(self):
        res = product_carleson_test(Measure.radial(-0.5), [ProductFactor(2, 0, 2)])
        assert not res.bounded
        assert res.fit.slope == pytest.approx(-0.5, abs=0.1)

    @pytest.mark.parametrize("t", [0.0, 1.0, 1.5])
    def test_agrees_with_classifier(self, t):
        factors = [ProductFactor(2, 0, 2), ProductFactor(4, 0, 2)]
        lam, gamma = 1.5, 0.0
        mu = Measure.radial(t)
        res = product_carleson_test(mu, factors)
        verdict = classify_skew_carleson(mu, CarlesonParams(lam, gamma)).verdict
        assert res.bounded == (verdict != "not_carleson")

    def test_inadmissible(self):
        with pytest.raises(ParameterError):
            ProductFactor(0, 0, 1)
