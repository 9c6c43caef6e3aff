"""Experiment orchestration: one subcommand on one configuration gives one report."""

from __future__ import annotations

import time
import warnings

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .errors import BoundaryGrowthWarning, HypothesisWarning, ParameterError
from .fitting import FIT_WINDOW, envelope_fit
from .geometry import (
    KobayashiBall,
    cached_lattice,
    delta_comparability_check,
    radial_grid,
    radial_point,
    radius_for_delta,
    weighted_ball_volume,
)
from .measures import (
    berezin_diagnostic,
    berezin_level,
    classify_skew_carleson,
    lattice_diagnostic,
    standard_grid,
)
from .report import Report, sanitize
from .toeplitz import compactness_probe, estimate_operator_norm, lower_bound_probe, radial_norm_exact

SUBCOMMANDS = ("params", "geometry", "carleson", "berezin", "toeplitz", "vanishing", "verify")


def _fit_dict(fit) -> dict:
    return fit.to_dict()


def _profile_table(report, name, diag):
    table = report.table(name, ["delta", "value"])
    for d, v in zip(diag.delta, diag.profile):
        table.add(d, v)


def _sweep_grid(cfg: ExperimentConfig) -> np.ndarray:
    g, d = cfg.grid, cfg.model_domain()
    if g.count is None:
        return standard_grid(d.n, g.depth, g.per_decade, d.weight_convention)
    return radial_point(d.n, radius_for_delta(np.geomspace(1.0, g.depth, g.count), d.weight_convention))


def _params(cfg: ExperimentConfig, report: Report):
    cp = cfg.carleson_params()
    out = {"carleson": {"lam": cp.lam, "gamma": cp.gamma, "theta": cp.theta if cp.gamma is not None else None,
                        "r": cp.r, "branch": cp.branch}}
    if cfg.operator is not None:
        op = cfg.operator_params()
        out["operator"] = op.as_dict()
        out["exponent_identity_defect"] = op.exponent_identity_defect()
        report.flags["hypothesis"] = list(op.hypothesis)
        report.flags["hypothesis_ok"] = op.hypothesis_ok
        if not op.hypothesis_ok:
            report.flags["banner"] = op.banner
    report.results.update(out)


def _geometry(cfg: ExperimentConfig, report: Report):
    d = cfg.model_domain()
    r = cfg.carleson.r
    count = max(2, int(round(cfg.grid.per_decade * np.log10(0.1 / cfg.grid.depth))) + 1)
    pts = radial_grid(d.n, cfg.grid.depth, count, convention=d.weight_convention)
    deltas = np.asarray(d.delta(pts), dtype=float)
    vol = np.asarray(weighted_ball_volume(d.n, pts, r, 0.0, d.weight_convention), dtype=float)
    table = report.table("balls", ["delta", "volume", "delta_ratio_min", "delta_ratio_max"])
    for z, dz, v in zip(pts, deltas, vol):
        lo, hi = delta_comparability_check(d, z, r, 200, cfg.seed)
        table.add(dz, v, lo, hi)
    fit = envelope_fit(deltas, vol, FIT_WINDOW)
    lat = cached_lattice(d.n, d.weight_convention, r, max(cfg.domain.eps, 1e-2))
    report.results.update({
        "volume_exponent": _fit_dict(fit),
        "expected_exponent": d.n + 1,
        "lattice": {"r": r, "eps": lat.boundary_cutoff, "centers": len(lat),
                    "covering_radius": lat.covering_radius, "overlap_bound": lat.overlap_bound},
        "sample_ball": {"center_radius": 0.9, "r": r,
                        "semi_axes": [float(x) for x in KobayashiBall(radial_point(d.n, 0.9), r).ellipsoid()[1:]]},
    })


def _carleson(cfg: ExperimentConfig, report: Report):
    mu, cp = cfg.build_measure(), cfg.carleson_params()
    tol, eps = cfg.thresholds.slope_tol, cfg.domain.eps
    grid = None
    if cp.lam >= 1 and not mu.discrete:
        grid = _sweep_grid(cfg)
    diag = classify_skew_carleson(mu, cp, grid, eps, cfg.domain.weight_convention, tol)
    report.results["measure"] = mu.describe()
    report.results["diagnostic"] = diag.summary()
    report.results["fit"] = _fit_dict(diag.fit)
    report.results["verdict"] = diag.verdict
    report.results["norm"] = {"value": diag.value, "deepest_delta": diag.deepest}
    _profile_table(report, "profile", diag)
    if cfg.domain.n == 1 and cp.lam != 0 and not mu.is_zero:
        lat = cached_lattice(1, "smooth", cp.r, max(eps, 1e-3))
        ld = lattice_diagnostic(mu, cp, lat, tol)
        report.results["lattice"] = ld.summary()
        report.flags["lattice_agrees"] = ld.verdict == diag.verdict


def _berezin(cfg: ExperimentConfig, report: Report):
    mu, cp = cfg.build_measure(), cfg.carleson_params()
    if cp.lam == 0:
        raise ParameterError("the Berezin test needs lam != 0")
    s = cfg.berezin.level if cfg.berezin.level is not None else berezin_level(cp)
    diag = berezin_diagnostic(mu, cp, s, cfg.domain.eps, cfg.domain.weight_convention,
                              cfg.thresholds.slope_tol)
    report.results.update({"measure": mu.describe(), "level": s, "diagnostic": diag.summary(),
                           "fit": _fit_dict(diag.fit), "verdict": diag.verdict})
    _profile_table(report, "profile", diag)


def _toeplitz(cfg: ExperimentConfig, report: Report):
    mu, op = cfg.build_measure(), cfg.operator_params()
    tol, eps = cfg.thresholds.slope_tol, cfg.domain.eps
    cp = op.carleson(cfg.carleson.r)
    report.flags["hypothesis"] = list(op.hypothesis)
    report.flags["hypothesis_ok"] = op.hypothesis_ok
    if not op.hypothesis_ok:
        report.flags["banner"] = op.banner
    est = estimate_operator_norm(mu, op, eps=eps, seed=cfg.seed)
    diag = classify_skew_carleson(mu, cp, None, eps, cfg.domain.weight_convention, tol)
    out = {"operator": op.as_dict(), "measure": mu.describe(), "estimate": est.summary(),
           "estimate_fit": _fit_dict(est.fit), "norm": diag.summary(), "verdict": diag.verdict}
    slopes = {"estimate": est.fit.slope, "norm": diag.fit.slope}
    values = {"estimate": est.value, "norm": diag.value}
    if op.lam >= 1:
        deltas = np.geomspace(0.1, eps, 13)
        centers = radial_point(op.n, radius_for_delta(deltas))
        probes = [lower_bound_probe(mu, op, a, cfg.carleson.r) for a in centers]
        table = report.table("lower_bound", ["delta", "probe", "ball_mass", "toeplitz_at_center", "chain_ratio"])
        for p in probes:
            table.add(p.delta, p.probe, p.ball_mass, p.toeplitz_at_center, p.chain_ratio)
        lfit = envelope_fit(deltas, np.array([p.probe for p in probes]), FIT_WINDOW)
        out["lower_bound"] = {"sup": max(p.probe for p in probes), "fit": _fit_dict(lfit)}
        slopes["lower"] = lfit.slope
        values["lower"] = out["lower_bound"]["sup"]
    if not mu.discrete and op.p1 == 2 and op.p2 == 2:
        out["exact_norm"] = radial_norm_exact(mu, op)
    bounded = {k: bool(v >= -tol) for k, v in slopes.items()}
    out["bounded"] = bounded
    out["agree"] = len(set(bounded.values())) == 1
    if out["agree"] and all(bounded.values()):
        cap = cfg.thresholds.ratio_cap
        keys = sorted(values)
        ratios = {f"{a}/{b}": values[a] / values[b] for i, a in enumerate(keys) for b in keys[i + 1:]}
        out["ratios"] = ratios
        out["ratios_within_cap"] = all(1.0 / cap <= x <= cap for x in ratios.values())
    table = report.table("kernel_probe", ["delta", "ratio"])
    for d, v in zip(est.delta, est.kernel_ratios):
        table.add(d, v)
    report.results.update(out)


def _vanishing(cfg: ExperimentConfig, report: Report):
    mu, op = cfg.build_measure(), cfg.operator_params()
    tol = cfg.thresholds.slope_tol
    probe = compactness_probe(mu, op, tol=tol)
    diag = classify_skew_carleson(mu, op.carleson(cfg.carleson.r), None, cfg.domain.eps,
                                  cfg.domain.weight_convention, tol)
    report.results.update({"operator": op.as_dict(), "measure": mu.describe(), "probe": probe.summary(),
                           "classifier": diag.summary(), "verdict": probe.verdict,
                           "agree": probe.verdict == diag.verdict})
    table = report.table("compactness", ["delta", "image_norm"])
    for d, v in zip(probe.delta, probe.norms):
        table.add(d, v)


def _verify(cfg: ExperimentConfig, report: Report):
    from .acceptance import run_acceptance

    results = run_acceptance(cfg.seed)
    table = report.table("criteria", ["criterion", "name", "passed"])
    for res in results:
        table.add(res.number, res.name, res.passed)
        report.results[f"criterion_{res.number}"] = {"name": res.name, "passed": res.passed,
                                                     "evidence": res.evidence}
        report.timing[f"criterion_{res.number}"] = res.runtime
    report.flags["all_passed"] = all(r.passed for r in results)


_HANDLERS = {
    "params": _params,
    "geometry": _geometry,
    "carleson": _carleson,
    "berezin": _berezin,
    "toeplitz": _toeplitz,
    "vanishing": _vanishing,
    "verify": _verify,
}


def run(subcommand: str, cfg: ExperimentConfig) -> Report:
    """Run one subcommand and return its report."""
    if subcommand not in _HANDLERS:
        raise ParameterError(f"unknown subcommand {subcommand!r}; choose from {SUBCOMMANDS}")
    report = Report(subcommand, cfg.seed, sanitize(cfg.to_dict()), __version__)
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BoundaryGrowthWarning)
        warnings.simplefilter("always", HypothesisWarning)
        _HANDLERS[subcommand](cfg, report)
    notes = sorted({str(w.message) for w in caught
                    if issubclass(w.category, (BoundaryGrowthWarning, HypothesisWarning))})
    if notes:
        report.flags["warnings"] = notes
    report.timing["total_seconds"] = time.perf_counter() - t0
    report.results = sanitize(report.results)
    report.flags = sanitize(report.flags)
    return report
