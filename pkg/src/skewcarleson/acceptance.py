"""Built-in acceptance battery.

Each criterion returns a :class:`CriterionResult` carrying the numbers it
was decided on.  Runtimes are kept apart from the evidence so that two runs
with the same seed produce identical evidence.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryGrowthWarning
from .fitting import FIT_WINDOW, envelope_fit, loglog_fit
from .geometry import (
    KobayashiBall,
    _pullback_ball_volume,
    cached_lattice,
    radial_grid,
    radial_point,
    radius_for_delta,
    unweighted_ball_volume,
    weighted_ball_volume,
)
from .kernels import (
    KernelParams,
    Polynomial,
    bergman_kernel,
    bergman_project,
    kernel_integral_estimate,
    normalized_kernel,
    theorem_exponent,
)
from .measures import (
    CarlesonParams,
    Measure,
    berezin_diagnostic,
    berezin_transform,
    classify_skew_carleson,
    lattice_diagnostic,
    reweight,
    skew_carleson_diagnostic,
)
from .quadrature import disk_rule, integrate, monte_carlo_oracle
from .toeplitz import compactness_probe, derive_params, estimate_operator_norm, lower_bound_probe

SLOPE_TOL = 0.1
RATIO_CAP = 100.0


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    evidence: dict = field(default_factory=dict)
    runtime: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.name} ({self.runtime:.1f} s)"


def _timed(number, name, budget=None):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, evidence = fn(*args, **kwargs)
            dt = time.perf_counter() - t0
            if budget is not None:
                passed = passed and dt < budget
            return CriterionResult(number, name, bool(passed), evidence, dt, budget)
        run.number = number
        run.name = name
        return run
    return wrap


def _random_points(count, rmax, rng):
    rad = rmax * np.sqrt(rng.random(count))
    return rad * np.exp(2j * np.pi * rng.random(count))


@_timed(1, "reproducing property of P_beta on monomials", budget=10.0)
def criterion_1(seed: int = 0):
    rng = np.random.default_rng(seed)
    pts = _random_points(20, 0.9, rng)
    rule = disk_rule()
    worst = {}
    for beta in (0.0, 0.5, 1.0, 2.0):
        kp = KernelParams(1, beta)
        err = 0.0
        for deg in range(6):
            f = Polynomial.monomial(1, deg)
            exact = f(pts)
            got = bergman_project(kp, f, pts, rule)
            err = max(err, float(np.max(np.abs(got - exact) / np.maximum(np.abs(exact), 1e-300))))
        worst[str(beta)] = err
    return max(worst.values()) < 1e-6, {"max_relative_error": worst, "points": 20, "max_degree": 5}


@_timed(2, "unit norm of normalized kernels")
def criterion_2(seed: int = 0):
    rule = disk_rule()
    errs = {}
    for beta in (0.0, 1.0):
        kp = KernelParams(1, beta)
        for a in (0.0, 0.5, 0.9, 0.99):
            est, _ = integrate(rule.centered([a]), lambda w: np.abs(normalized_kernel(kp, a, w)) ** 2, beta)
            errs[f"beta={beta:g},a={a:g}"] = abs(math.sqrt(est) - 1.0)
    return max(errs.values()) < 1e-6, {"abs_error": errs}


@_timed(3, "Berezin identity B^2 nu = 1")
def criterion_3(seed: int = 0):
    rng = np.random.default_rng(seed)
    deltas = np.geomspace(1.0, 1e-3, 20)
    pts = radius_for_delta(deltas) * np.exp(2j * np.pi * rng.random(20))
    nu = Measure.radial(0.0)
    quad = np.asarray(berezin_transform(nu, pts, 2.0, rule=disk_rule()))
    closed = np.asarray(berezin_transform(nu, pts, 2.0))
    err_q = float(np.max(np.abs(quad - 1.0)))
    err_c = float(np.max(np.abs(closed - 1.0)))
    return max(err_q, err_c) < 1e-6, {"quadrature_max_error": err_q, "closed_form_max_error": err_c,
                                      "deepest_delta": float(deltas[-1])}


@_timed(4, "ball volumes and their boundary exponent")
def criterion_4(seed: int = 0):
    r = 0.5
    centers = [0.0, 0.5, 0.9, 0.99, 0.999]
    rel = []
    for c in centers:
        closed = float(unweighted_ball_volume(1, c, r))
        quad = _pullback_ball_volume(1, np.array([c]), r, 0.0, "smooth")
        rel.append(abs(quad / closed - 1.0))
    mc = {}
    mc_ok = True
    for i, c in enumerate((0.0, 0.5, 0.9)):
        ball = KobayashiBall(np.array([c]), r)
        est, se = monte_carlo_oracle(lambda z, b=ball: b.contains(z).astype(float), 0.0, 10 ** 6, seed + i)
        closed = float(unweighted_ball_volume(1, c, r))
        mc[str(c)] = {"estimate": est, "standard_error": se, "closed_form": closed}
        mc_ok &= abs(est - closed) <= 3 * se
    slopes = {}
    z = radial_grid(1, 1e-3, 25)
    d = 1.0 - np.abs(z[:, 0]) ** 2
    for beta in (0.0, 0.5, 1.0):
        vol = weighted_ball_volume(1, z, r, beta)
        slopes[str(beta)] = loglog_fit(d, vol).slope
    fit_ok = all(abs(s - (2.0 + float(b))) <= 0.05 for b, s in slopes.items())
    passed = max(rel) < 1e-6 and mc_ok and fit_ok
    return passed, {"closed_vs_quadrature_rel": max(rel), "monte_carlo": mc, "exponent_fits": slopes}


@_timed(5, "kernel integral exponents and two-sided ball bound")
def criterion_5(seed: int = 0):
    rule = disk_rule()
    z = radial_grid(1, 1e-3, 13)
    d = 1.0 - np.abs(z[:, 0]) ** 2
    slopes = {}
    ok = True
    for p, alpha, beta in ((2, 0, 0), (2, 1, 0), (3, 0, 1)):
        kp = KernelParams(1, beta)
        quad = [kernel_integral_estimate(kp, zz, p, alpha, rule) for zz in z]
        closed = [kernel_integral_estimate(kp, zz, p, alpha) for zz in z]
        expect = theorem_exponent(kp, p, alpha)
        sq, sc = loglog_fit(d, quad).slope, loglog_fit(d, closed).slope
        slopes[f"p={p},alpha={alpha},beta={beta}"] = {"quadrature": sq, "closed_form": sc, "expected": expect}
        ok &= abs(sq - expect) <= 0.05 and abs(sc - expect) <= 0.05
    rng = np.random.default_rng(seed)
    r = 0.5
    bounds = {}
    for beta in (0.0, 1.0):
        kp = KernelParams(1, beta)
        b = kp.order
        lo, hi = kp.constant * (1 - r) ** b, kp.constant * (1 + r) ** b
        vals = []
        for a in radius_for_delta(np.geomspace(0.1, 1e-3, 10)):
            ball = KobayashiBall(np.array([a]), r)
            pts = ball.sample(100, rng)
            vals.append(np.abs(bergman_kernel(kp, pts, np.array([a]))) * (1 - a * a) ** b)
        vals = np.concatenate(vals)
        bounds[str(beta)] = {"min": float(vals.min()), "max": float(vals.max()), "lower": lo, "upper": hi}
        ok &= lo <= vals.min() and vals.max() <= hi
    return ok, {"slopes": slopes, "ball_bound": bounds}


@_timed(6, "classifier ground truth for delta^t nu", budget=60.0)
def criterion_6(seed: int = 0):
    expected = {-0.5: "not_carleson", 0.0: "carleson", 0.5: "vanishing"}
    rows = {}
    ok = True
    for t, want in expected.items():
        for r in (0.3, 0.5, 0.7):
            diag = classify_skew_carleson(Measure.radial(t), CarlesonParams(1.0, 0.0, r))
            rows[f"t={t:g},r={r:g}"] = {"verdict": diag.verdict, "slope": diag.fit.slope}
            ok &= diag.verdict == want and abs(diag.fit.slope - t) <= SLOPE_TOL
    return ok, rows


def cross_battery():
    """Measures and ``(lam, gamma)`` pairs spanning both branches."""
    items = []
    for lam, gamma in ((1.0, 0.0), (1.5, 0.0), (1.5, 0.5), (0.75, 0.0), (0.75, 0.5)):
        if lam >= 1:
            thr = (2.0 + gamma) * lam - 2.0
        else:
            thr = gamma * lam - (1.0 - lam)
        for t in (thr - 0.5, thr + 0.5):
            if t > -1:
                items.append((Measure.radial(t), CarlesonParams(lam, gamma)))
        if lam >= 1:
            items.append((Measure.radial(thr), CarlesonParams(lam, gamma)))
    for s in (1.5, 2.0, 2.5):
        items.append((Measure.boundary_atoms(s), CarlesonParams(1.0, 0.0)))
    return items


@_timed(7, "sup, lattice and Berezin diagnostics agree")
def criterion_7(seed: int = 0):
    lat = cached_lattice(1, "smooth", 0.5, 1e-3)
    rows = []
    ok = True
    lams = set()
    for mu, cp in cross_battery():
        a = skew_carleson_diagnostic(mu, cp)
        b = lattice_diagnostic(mu, cp, lat)
        c = berezin_diagnostic(mu, cp)
        agree = a.verdict == b.verdict == c.verdict and a.verdict != "inconclusive"
        row = {"measure": mu.label, "lam": cp.lam, "gamma": cp.gamma,
               "verdicts": [a.verdict, b.verdict, c.verdict],
               "slopes": [a.fit.slope, b.fit.slope, c.fit.slope]}
        if cp.lam < 1 and a.verdict == "vanishing":
            ratio = b.value / a.value
            row["lattice_to_continuous"] = ratio
            agree &= 0.1 <= ratio <= 10.0
        rows.append(row)
        ok &= agree
        lams.add(cp.lam)
    ok &= len(rows) >= 6 and {0.75, 1.0, 1.5} <= lams
    return ok, {"battery": rows, "lattice_centers": len(lat)}


def sandwich_battery():
    """``(measure, operator)`` pairs satisfying the exponent hypothesis."""
    return [
        (Measure.radial(1.0), derive_params(2, 1, 2, 1, 1)),
        (Measure.radial(0.0), derive_params(2, 0, 2, 0, 0)),
        (Measure.radial(0.5), derive_params(2, 0, 2, 0, 0)),
        (Measure.radial(-0.5), derive_params(2, 0, 2, 0, 0)),
        (Measure.radial(1.0), derive_params(2, 0, 2, 0, 1)),
        (Measure.radial(0.5), derive_params(2, 0, 2, 0, 1)),
        (Measure.radial(1.5), derive_params(2, 0, 4, 0, 1)),
        (Measure.radial(1.0), derive_params(2, 0, 4, 0, 1)),
        (Measure.radial(4.0 / 3.0), derive_params(1.5, 0, 2, 0, 1)),
        (Measure.boundary_atoms(2.0), derive_params(2, 0, 2, 0, 0)),
        (Measure.boundary_atoms(1.5), derive_params(2, 0, 2, 0, 0)),
    ]


def sandwich(mu: Measure, op, eps: float = 1e-3, tol: float = SLOPE_TOL, seed: int = 0) -> dict:
    """Lower probe, operator-norm estimate and skew-Carleson norm with their growth slopes."""
    deltas = np.geomspace(0.1, eps, 13)
    centers = radial_point(op.n, radius_for_delta(deltas))
    probes = np.array([lower_bound_probe(mu, op, a).probe for a in centers])
    lower_fit = envelope_fit(deltas, probes, FIT_WINDOW)
    est = estimate_operator_norm(mu, op, trials=2, eps=eps, seed=seed)
    diag = skew_carleson_diagnostic(mu, op.carleson(), eps=eps)
    slopes = {"lower": lower_fit.slope, "estimate": est.fit.slope, "norm": diag.fit.slope}
    values = {"lower": float(np.max(probes)), "estimate": est.value, "norm": diag.value}
    bounded = {k: bool(v >= -tol) for k, v in slopes.items()}
    return {"values": values, "slopes": slopes, "bounded": bounded, "estimate_by_family": est.by_family}


@_timed(8, "operator-norm sandwich", budget=300.0)
def criterion_8(seed: int = 0):
    rows = []
    ok = True
    for mu, op in sandwich_battery():
        ok &= op.hypothesis_ok
        res = sandwich(mu, op, seed=seed)
        flags = set(res["bounded"].values())
        agree = len(flags) == 1
        row = {"measure": mu.label, "operator": [op.p1, op.alpha1, op.p2, op.alpha2, op.beta],
               "lam": op.lam, "gamma": op.gamma, **res, "agree": agree}
        if agree and flags == {True}:
            v = res["values"]
            ratios = [v["lower"] / v["estimate"], v["estimate"] / v["norm"], v["lower"] / v["norm"]]
            row["ratios"] = ratios
            agree &= all(1.0 / RATIO_CAP <= x <= RATIO_CAP for x in ratios)
        rows.append(row)
        ok &= agree
    ident = estimate_operator_norm(Measure.radial(1.0), derive_params(2, 1, 2, 1, 1), seed=seed).value
    ok &= 1.0 - 1e-4 <= ident <= 1.0 + 1e-12
    ok &= len(rows) >= 8
    return ok, {"battery": rows, "identity_estimate": ident}


@_timed(9, "compactness probe exponents")
def criterion_9(seed: int = 0):
    op = derive_params(2, 0, 2, 0, 0)
    rows = {}
    ok = True
    for t, want_slope in ((0.5, 0.5), (0.0, 0.0)):
        mu = Measure.radial(t)
        probe = compactness_probe(mu, op)
        verdict = classify_skew_carleson(mu, op.carleson()).verdict
        rows[f"t={t:g}"] = {"slope": probe.slope, "probe_verdict": probe.verdict, "classifier": verdict}
        ok &= abs(probe.slope - want_slope) <= SLOPE_TOL and probe.verdict == verdict
    return ok, rows


@_timed(10, "reweighting preserves the norm up to constants")
def criterion_10(seed: int = 0):
    rows = []
    ok = True
    for lam, gamma in ((1.0, 0.0), (1.5, 0.5), (0.75, 0.0)):
        for t in (0.0, 0.5, 1.0):
            mu = Measure.radial(t)
            base = skew_carleson_diagnostic(mu, CarlesonParams(lam, gamma))
            if base.verdict == "not_carleson":
                continue
            for beta in (0.5, 1.0):
                new = skew_carleson_diagnostic(reweight(mu, beta), CarlesonParams(lam, gamma + beta / lam))
                ratio = new.value / base.value
                rows.append({"measure": mu.label, "lam": lam, "gamma": gamma, "beta": beta, "ratio": ratio})
                ok &= 0.1 <= ratio <= 10.0
    for s in (2.0, 2.5):
        mu = Measure.boundary_atoms(s)
        base = skew_carleson_diagnostic(mu, CarlesonParams(1.0, 0.0))
        for beta in (0.5, 1.0):
            new = skew_carleson_diagnostic(reweight(mu, beta), CarlesonParams(1.0, beta))
            ratio = new.value / base.value
            rows.append({"measure": mu.label, "lam": 1.0, "gamma": 0.0, "beta": beta, "ratio": ratio})
            ok &= 0.1 <= ratio <= 10.0
    return ok, {"battery": rows}


@_timed(11, "deterministic reports")
def criterion_11(seed: int = 0):
    from .config import parse_config
    from .report import to_json
    from .runner import run

    cfg = parse_config({"measure": {"kind": "boundary_atoms", "s": 2.0}, "seed": seed})
    first = to_json(run("carleson", cfg), include_timing=False)
    second = to_json(run("carleson", cfg), include_timing=False)
    return first == second, {"bytes": len(first), "identical": first == second}


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def run_acceptance(seed: int = 0, only=None) -> list:
    """Run the battery; ``only`` restricts it to the given criterion numbers."""
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryGrowthWarning)
        for crit in CRITERIA:
            if only is None or crit.number in only:
                results.append(crit(seed))
    return results
