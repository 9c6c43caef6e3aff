"""Finite positive measures on the ball and the skew-Carleson diagnostics.

Three representations are supported:

* ``atomic``: finitely many weighted point masses;
* ``radial_density``: ``scale * (1 - |w|^2)^t dnu``;
* ``lattice_weighted``: point masses on the centers of an r-lattice.

Radial densities always use the smooth weight ``1 - |w|^2``, which keeps
ball masses and Berezin transforms in closed form.  The ``convention``
arguments below only change the ``delta`` factors of the diagnostics.

Boundary behaviour is read off as log-log slopes over
``delta in [1e-3, 1e-1]``.  For a density ``delta^t nu`` every diagnostic
of the ``(lam, gamma)`` class has slope ``e = n+1+t - (n+1+gamma) lam``
when ``lam >= 1``; when ``lam < 1`` the ``L^q`` diagnostics with
``q = 1/(1-lam)`` converge iff ``q (t - gamma lam) + 1 > 0``, which is the
slope of the integral over dyadic shells.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryGrowthWarning, ParameterError
from .fitting import FIT_WINDOW, SLOPE_TOL, Fit, depth_ok, envelope_fit
from .geometry import (
    Lattice,
    boundary_distance,
    check_inside,
    delta_from_smooth,
    inner,
    one_minus_norm_sq,
    pseudo_hyperbolic,
    radial_point,
    radius_for_delta,
    smooth_weighted_ball_volume,
    unweighted_ball_volume,
    ModelDomain,
)
from .kernels import kernel_modulus_integral, weighted_volume
from .quadrature import QuadratureRule, ball_rule, integrate, truncated_disk_rule

KINDS = ("atomic", "radial_density", "lattice_weighted")
VERDICTS = ("carleson", "vanishing", "not_carleson", "inconclusive", "no_verdict")
_CHUNK = 1 << 22


@dataclass(frozen=True)
class Measure:
    """A finite positive Borel measure on the ball of C^n."""

    kind: str
    n: int = 1
    points: np.ndarray | None = None
    weights: np.ndarray | None = None
    exponent: float | None = None
    scale: float = 1.0
    lattice_r: float | None = None
    label: str = ""
    total_mass: float = field(init=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"measure kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "radial_density":
            if self.exponent is None or not self.exponent > -1:
                raise ParameterError(f"radial density exponent must exceed -1, got {self.exponent}")
            if not self.scale >= 0:
                raise ParameterError(f"density scale must be nonnegative, got {self.scale}")
            mass = self.scale * weighted_volume(self.n, self.exponent)
        else:
            pts = check_inside(np.asarray(self.points, dtype=complex).reshape(-1, self.n), self.n)
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if w.shape[0] != pts.shape[0]:
                raise ParameterError("atom points and weights differ in length")
            if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
                raise ParameterError("atom weights must be positive and finite")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", w)
            mass = float(np.sum(w))
        if not math.isfinite(mass):
            raise ParameterError("measure has infinite total mass")
        object.__setattr__(self, "total_mass", float(mass))

    # constructors ----------------------------------------------------------
    @classmethod
    def atomic(cls, points, weights, n: int = 1, label: str = "") -> "Measure":
        return cls("atomic", n, points=points, weights=weights, label=label)

    @classmethod
    def zero(cls, n: int = 1) -> "Measure":
        return cls("atomic", n, points=np.zeros((0, n), dtype=complex), weights=np.zeros(0), label="zero")

    @classmethod
    def radial(cls, t: float = 0.0, scale: float = 1.0, n: int = 1, label: str = "") -> "Measure":
        return cls("radial_density", n, exponent=float(t), scale=float(scale),
                   label=label or f"delta^{t:g} nu")

    @classmethod
    def lattice_weighted(cls, lattice: Lattice, weights, label: str = "") -> "Measure":
        return cls("lattice_weighted", lattice.domain.n, points=lattice.centers, weights=weights,
                   lattice_r=lattice.r, label=label)

    @classmethod
    def lattice_power(cls, lattice: Lattice, s: float) -> "Measure":
        """Masses ``delta(a_k)^s`` on lattice centers (smooth delta)."""
        return cls.lattice_weighted(lattice, one_minus_norm_sq(lattice.centers) ** s,
                                    label=f"lattice delta^{s:g}")

    @classmethod
    def boundary_atoms(cls, s: float, n: int = 1, kmax: int = 12, direction=None) -> "Measure":
        """Atoms at ``(1 - 2^-k) e`` with masses ``delta^s`` (smooth delta)."""
        k = np.arange(1, kmax + 1, dtype=float)
        pts = radial_point(n, 1.0 - 2.0 ** (-k), direction)
        return cls.atomic(pts, one_minus_norm_sq(pts) ** s, n, label=f"boundary atoms delta^{s:g}")

    # ---------------------------------------------------------------------
    @property
    def discrete(self) -> bool:
        return self.kind != "radial_density"

    @property
    def is_zero(self) -> bool:
        return self.total_mass == 0.0

    def scaled(self, c: float) -> "Measure":
        if c <= 0:
            raise ParameterError("measures can only be scaled by a positive factor")
        if self.discrete:
            return Measure(self.kind, self.n, self.points, self.weights * c, None, 1.0, self.lattice_r,
                           self.label)
        return Measure.radial(self.exponent, self.scale * c, self.n, self.label)

    def describe(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "label": self.label, "total_mass": self.total_mass}
        if self.discrete:
            out["atoms"] = int(self.weights.shape[0])
        else:
            out.update(exponent=self.exponent, scale=self.scale)
        return out


@dataclass(frozen=True)
class CarlesonParams:
    """Class parameters ``(lam, gamma)`` with ball radius ``r``."""

    lam: float
    gamma: float | None = 0.0
    r: float = 0.5
    n: int = 1

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ParameterError(f"ball radius parameter r must lie in (0, 1), got {self.r}")
        if self.gamma is None and self.lam != 0:
            raise ParameterError("gamma is required unless lam = 0")

    @property
    def theta(self) -> float:
        return 1.0 + (self.gamma or 0.0) / (self.n + 1)

    @property
    def branch(self) -> str:
        return "sup" if self.lam >= 1 else "integral"

    @property
    def q(self) -> float:
        """Integrability exponent ``1/(1-lam)`` of the ``lam < 1`` branch."""
        return 1.0 / (1.0 - self.lam) if self.lam < 1 else math.inf


# ----------------------------------------------------------------------------
# ball masses and averages
# ----------------------------------------------------------------------------

def _atomic_ball_mass(mu: Measure, centers: np.ndarray, r: float) -> np.ndarray:
    flat = centers.reshape(-1, mu.n)
    out = np.zeros(flat.shape[0])
    if mu.weights.size == 0:
        return out.reshape(centers.shape[:-1])
    step = max(1, _CHUNK // max(1, mu.weights.size))
    for i in range(0, flat.shape[0], step):
        block = flat[i:i + step]
        rho = pseudo_hyperbolic(block[:, None, :], mu.points[None, :, :], mu.n)
        out[i:i + step] = (rho < r).astype(float) @ mu.weights
    return out.reshape(centers.shape[:-1])


def ball_mass(mu: Measure, centers, r: float):
    """``mu(B(z, r))`` for one or many centers."""
    if not 0.0 < r < 1.0:
        raise ParameterError(f"ball radius parameter must lie in (0, 1), got {r}")
    centers = check_inside(centers, mu.n)
    if mu.discrete:
        val = _atomic_ball_mass(mu, centers, r)
    else:
        val = mu.scale * smooth_weighted_ball_volume(mu.n, centers, r, mu.exponent)
    return val.item() if np.ndim(val) == 0 else val


def mu_hat(mu: Measure, z, r: float, theta: float = 1.0):
    """``mu(B(z,r)) / nu(B(z,r))^theta``."""
    z = check_inside(z, mu.n)
    val = np.asarray(ball_mass(mu, z, r)) / unweighted_ball_volume(mu.n, z, r) ** theta
    return val.item() if np.ndim(val) == 0 else val


def _delta(z, n, convention):
    return np.asarray(boundary_distance(ModelDomain(n, convention), z), dtype=float)


# ----------------------------------------------------------------------------
# Berezin transform
# ----------------------------------------------------------------------------

def berezin_level(cp: CarlesonParams) -> float:
    """Level ``2 ceil(threshold)``, an even integer strictly above the admissibility threshold."""
    lam_theta = cp.lam * cp.theta
    if cp.lam >= 1:
        threshold = lam_theta
    else:
        threshold = lam_theta + cp.n / (cp.n + 1) * (1.0 - cp.lam)
    # 2 ceil(x) >= 2x > x, so the level is admissible; the slack absorbs rounding in x
    return float(max(2, 2 * math.ceil(threshold - 1e-12)))


def berezin_transform(mu: Measure, z, s: float = 2.0, rule: QuadratureRule | None = None,
                      warn: bool = True):
    """``B^s mu(z) = int |k_z(w)|^s dmu(w)`` with the unweighted kernel ``k_z``.

    Exact for discrete measures.  For densities the closed form is used
    unless ``rule`` is given, in which case the rule is re-centred at each
    ``z`` and applied.
    """
    if not s > 0:
        raise ParameterError(f"Berezin level must be positive, got {s}")
    n = mu.n
    z = check_inside(z, n)
    flat = z.reshape(-1, n)
    c0 = weighted_volume(n, 0.0) ** -1
    dz = one_minus_norm_sq(flat)
    if mu.discrete:
        out = np.zeros(flat.shape[0])
        if mu.weights.size:
            step = max(1, _CHUNK // mu.weights.size)
            for i in range(0, flat.shape[0], step):
                blk = flat[i:i + step]
                ip = np.tensordot(mu.points, np.conj(blk), axes=([-1], [-1]))
                mod = np.abs(1.0 - ip) ** (-(n + 1) * s)
                out[i:i + step] = (mu.weights @ mod) * c0 ** (s / 2) * dz[i:i + step] ** ((n + 1) * s / 2)
    else:
        t = mu.exponent
        if warn and s * (n + 1) / 2 > n + 1 + t:
            warnings.warn(
                f"Berezin level {s:g} exceeds the growth threshold for density exponent {t:g}; "
                "values blow up toward the boundary",
                BoundaryGrowthWarning,
                stacklevel=2,
            )
        if rule is None:
            out = mu.scale * c0 ** (s / 2) * dz ** ((n + 1) * s / 2) * kernel_modulus_integral(
                n, flat, (n + 1) * s / 2, t)
        else:
            out = np.empty(flat.shape[0])
            for i, a in enumerate(flat):
                local = rule.centered(a)
                est, _ = integrate(
                    local,
                    lambda w, a=a, da=dz[i]: (c0 * da ** (n + 1) / np.abs(1.0 - inner(w, a)) ** (2 * (n + 1))) ** (s / 2),
                    t,
                )
                out[i] = mu.scale * est
    out = out.reshape(z.shape[:-1])
    return out.item() if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# grids and integration nodes for diagnostics
# ----------------------------------------------------------------------------

def standard_grid(n: int = 1, eps: float = 1e-3, per_decade: int = 20, convention: str = "smooth",
                  direction=None) -> np.ndarray:
    """Radial grid from the origin down to ``delta = eps``, log-spaced in ``delta``."""
    count = int(round(per_decade * math.log10(1.0 / eps))) + 1
    deltas = np.geomspace(1.0, eps, count)
    return radial_point(n, radius_for_delta(deltas, convention), direction)


def _default_grid(mu: Measure, eps: float, convention: str) -> np.ndarray:
    grid = standard_grid(mu.n, eps, convention=convention)
    if mu.discrete and mu.weights.size:
        keep = _delta(mu.points, mu.n, convention) >= eps
        grid = np.concatenate([grid, mu.points[keep]])
    return grid


@dataclass(frozen=True)
class IntegrationNodes:
    """Nodes and ``dnu`` weights covering ``{delta >= eps}``."""

    points: np.ndarray
    weights: np.ndarray
    smooth_delta: np.ndarray


def _radial_nodes(n: int, eps: float, count: int = 240) -> IntegrationNodes:
    # dnu = pi^n/(n-1)! x^{n-1} dx over spheres, x = |z|^2 = 1 - e^u
    x, w = np.polynomial.legendre.leggauss(count)
    lo = math.log(eps)
    u = lo * 0.5 * (1.0 - x)
    wu = -lo * 0.5 * w
    d = np.exp(u)
    xs = 1.0 - d
    weights = math.pi ** n / math.factorial(n - 1) * xs ** (n - 1) * d * wu
    return IntegrationNodes(radial_point(n, np.sqrt(xs)), weights, d)


def _area_nodes(n: int, eps: float, seed: int = 0) -> IntegrationNodes:
    if n == 1:
        rule = truncated_disk_rule(eps, radial=96, angular=256)
        return IntegrationNodes(rule.nodes, rule.weights, rule.smooth_delta)
    rule = ball_rule(n, points=2 ** 14, replicates=4, seed=seed)
    keep = rule.smooth_delta >= eps
    return IntegrationNodes(rule.nodes[keep], rule.weights[keep], rule.smooth_delta[keep])


def integration_nodes(mu: Measure, eps: float, smooth_eps: bool = True, seed: int = 0) -> IntegrationNodes:
    """Radial nodes for densities, area nodes for discrete measures."""
    return _area_nodes(mu.n, eps, seed) if mu.discrete else _radial_nodes(mu.n, eps)


# ----------------------------------------------------------------------------
# skew-Carleson norm and classification
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    """Numeric evidence of one diagnostic: profile, fit and verdict."""

    name: str
    branch: str
    value: float
    fit: Fit
    verdict: str
    deepest: float
    delta: np.ndarray = field(repr=False)
    profile: np.ndarray = field(repr=False)
    note: str = ""

    def summary(self) -> dict:
        return {
            "name": self.name,
            "branch": self.branch,
            "value": self.value,
            "verdict": self.verdict,
            "slope": self.fit.slope,
            "residual": self.fit.residual,
            "fit_points": self.fit.points,
            "deepest_delta": self.deepest,
            "note": self.note,
        }


def _verdict_sup(fit: Fit, profile_in_window: np.ndarray, tol: float, window) -> tuple[str, str]:
    if profile_in_window.size and not np.any(profile_in_window > 0):
        return "vanishing", "diagnostic vanishes identically near the boundary"
    if not depth_ok(fit, window):
        return "inconclusive", f"grid too shallow for a fit ({fit.points} bins, deepest {fit.deepest:.3g})"
    if fit.slope > tol:
        return "vanishing", ""
    if fit.slope < -tol:
        return "not_carleson", ""
    return "carleson", ""


def _verdict_integral(fit: Fit, shells: np.ndarray, tol: float, window) -> tuple[str, str]:
    """``lam < 1``: the shell-integral slope is the convergence margin."""
    if shells.size and not np.any(shells > 0):
        return "vanishing", "diagnostic vanishes identically near the boundary"
    if not depth_ok(fit, window):
        return "inconclusive", f"grid too shallow for a fit ({fit.points} bins, deepest {fit.deepest:.3g})"
    if fit.slope > tol:
        return "vanishing", "lam < 1: finite norm, hence vanishing"
    if fit.slope < -tol:
        return "not_carleson", ""
    return "inconclusive", "lam < 1 at the integrability threshold"


def _in_window(delta, window):
    return (delta >= window[0] * (1 - 1e-9)) & (delta <= window[1] * (1 + 1e-9))


def _sup_diagnostic(name, delta, values, tol, window) -> Diagnostic:
    fit = envelope_fit(delta, values, window)
    verdict, note = _verdict_sup(fit, values[_in_window(delta, window)], tol, window)
    return Diagnostic(name, "sup", float(np.max(values)) if values.size else 0.0, fit, verdict,
                      float(np.min(delta)) if delta.size else float("nan"), delta, values, note)


def _integral_diagnostic(name, delta, dens, weights, q, tol, window) -> Diagnostic:
    contrib = weights * dens ** q
    fit = envelope_fit(delta, contrib, window, reduce="sum")
    verdict, note = _verdict_integral(fit, contrib[_in_window(delta, window)], tol, window)
    value = float(np.sum(contrib)) ** (1.0 / q)
    return Diagnostic(name, "integral", value, fit, verdict, float(np.min(delta)), delta, dens, note)


def _check_lam(cp: CarlesonParams):
    if cp.lam == 0 and cp.gamma not in (None, 0, 0.0):
        raise ParameterError("for lam = 0 the class does not depend on gamma; pass gamma=None")


def skew_carleson_diagnostic(mu: Measure, cp: CarlesonParams, grid=None, eps: float = 1e-3,
                             convention: str = "smooth", tol: float = SLOPE_TOL,
                             window=FIT_WINDOW) -> Diagnostic:
    """Sup (``lam >= 1``) or ``L^{1/(1-lam)}`` (``lam < 1``) skew-Carleson diagnostic."""
    _check_lam(cp)
    gamma = cp.gamma or 0.0
    if cp.lam >= 1:
        pts = _default_grid(mu, eps, convention) if grid is None else check_inside(grid, mu.n).reshape(-1, mu.n)
        d = _delta(pts, mu.n, convention)
        vals = np.asarray(mu_hat(mu, pts, cp.r, cp.lam)) * d ** (-gamma * cp.lam)
        return _sup_diagnostic("sup", d, vals, tol, window)
    nodes = integration_nodes(mu, eps)
    d = delta_from_smooth(nodes.smooth_delta, np.sqrt(1.0 - nodes.smooth_delta), convention)
    dens = np.asarray(mu_hat(mu, nodes.points, cp.r, 1.0)) * d ** (-gamma * cp.lam)
    diag = _integral_diagnostic("sup", d, dens, nodes.weights, cp.q, tol, window)
    if cp.lam == 0:
        return Diagnostic(diag.name, diag.branch, diag.value, diag.fit, "no_verdict", diag.deepest,
                          diag.delta, diag.profile, "lam = 0: no statement is made in this regime")
    return diag


def skew_carleson_norm(mu: Measure, cp: CarlesonParams, grid=None, eps: float = 1e-3,
                       convention: str = "smooth"):
    """``||mu||_{lam,gamma}`` on ``{delta >= eps}`` together with the deepest ``delta`` reached."""
    diag = skew_carleson_diagnostic(mu, cp, grid, eps, convention)
    return diag.value, diag.deepest


def classify_skew_carleson(mu: Measure, cp: CarlesonParams, grid=None, eps: float = 1e-3,
                           convention: str = "smooth", tol: float = SLOPE_TOL,
                           window=FIT_WINDOW) -> Diagnostic:
    """Verdict in {carleson, vanishing, not_carleson, inconclusive} with its evidence."""
    if mu.is_zero:
        empty = np.zeros(0)
        return Diagnostic("sup", cp.branch, 0.0, Fit(math.inf, 0.0, 0.0, 0, eps), "vanishing", eps,
                          empty, empty, "zero measure")
    return skew_carleson_diagnostic(mu, cp, grid, eps, convention, tol, window)


def lattice_diagnostic(mu: Measure, cp: CarlesonParams, lattice: Lattice, tol: float = SLOPE_TOL,
                       window=FIT_WINDOW) -> Diagnostic:
    """Lattice test: ``mu(B(a_k,r)) / nu(B(a_k,r))^{lam theta}`` over the centers.

    For ``lam >= 1`` the values must stay bounded; for ``lam < 1`` the
    sequence must lie in ``l^{1/(1-lam)}``.
    """
    _check_lam(cp)
    centers = lattice.centers
    d = np.asarray(boundary_distance(lattice.domain, centers), dtype=float)
    vals = np.asarray(mu_hat(mu, centers, lattice.r, cp.lam * cp.theta), dtype=float)
    if cp.lam >= 1:
        return _sup_diagnostic("lattice", d, vals, tol, window)
    return _integral_diagnostic("lattice", d, vals, np.ones_like(vals), cp.q, tol, window)


def berezin_diagnostic(mu: Measure, cp: CarlesonParams, s: float | None = None, eps: float = 1e-3,
                       convention: str = "smooth", tol: float = SLOPE_TOL, window=FIT_WINDOW) -> Diagnostic:
    """Berezin test at level ``s`` (default :func:`berezin_level`)."""
    _check_lam(cp)
    n = mu.n
    s = berezin_level(cp) if s is None else float(s)
    lt = cp.lam * cp.theta
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryGrowthWarning)
        if cp.lam >= 1:
            if not s > lt:
                raise ParameterError(f"Berezin level must exceed lam*theta = {lt:g}, got {s:g}")
            pts = _default_grid(mu, eps, convention)
            d = _delta(pts, n, convention)
            vals = np.asarray(berezin_transform(mu, pts, s)) * d ** ((n + 1) * (s / 2 - lt))
            return _sup_diagnostic("berezin", d, vals, tol, window)
        threshold = lt + n / (n + 1) * (1.0 - cp.lam)
        if not s > threshold:
            raise ParameterError(f"Berezin level must exceed {threshold:g}, got {s:g}")
        nodes = integration_nodes(mu, eps)
        d = delta_from_smooth(nodes.smooth_delta, np.sqrt(1.0 - nodes.smooth_delta), convention)
        dens = np.asarray(berezin_transform(mu, nodes.points, s)) * d ** (
            -(n + 1) * (lt - s / 2 + 1.0 - cp.lam))
        return _integral_diagnostic("berezin", d, dens, nodes.weights, cp.q, tol, window)


# ----------------------------------------------------------------------------
# reweighting and the product characterisation
# ----------------------------------------------------------------------------

def reweight(mu: Measure, beta: float, convention: str = "smooth") -> Measure:
    """``delta^beta mu``."""
    if beta == 0:
        return mu
    if mu.discrete:
        w = mu.weights * _delta(mu.points, mu.n, convention) ** beta
        if not np.all(np.isfinite(w)):
            raise ParameterError("reweighted atom masses are not finite")
        return Measure(mu.kind, mu.n, mu.points, w, None, 1.0, mu.lattice_r,
                       f"delta^{beta:g} * {mu.label}".strip())
    if convention != "smooth":
        raise ParameterError("radial densities are defined with the smooth weight")
    t = mu.exponent + beta
    if not t > -1:
        raise ParameterError(f"reweighted density exponent {t:g} is not integrable (needs > -1)")
    return Measure.radial(t, mu.scale, mu.n)


@dataclass(frozen=True)
class ProductFactor:
    """One factor ``|f_j|^{q_j}`` with ``f_j`` in ``A^{p_j}_{alpha_j}``."""

    p: float
    alpha: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0 and self.alpha > -1):
            raise ParameterError(f"inadmissible product exponents {self}")


@dataclass(frozen=True)
class ProductResult:
    lam: float
    gamma: float
    max_ratio: float
    constant_ratio: float
    fit: Fit
    bounded: bool
    delta: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)


def product_parameters(factors) -> tuple[float, float]:
    lam = sum(f.q / f.p for f in factors)
    gamma = sum(f.alpha * f.q / f.p for f in factors) / lam
    return lam, gamma


def product_carleson_test(mu: Measure, factors, trials: int = 4, eps: float = 1e-3, count: int = 25,
                          seed: int = 0, tol: float = SLOPE_TOL, window=FIT_WINDOW) -> ProductResult:
    """Ratios ``int prod |f_j|^{q_j} dmu / prod ||f_j||^{q_j}`` over kernel-type test functions.

    ``f_j = k_a^{sigma_j}`` with ``sigma_j = 2 theta_j / p_j + 1``; the
    normalising powers of ``delta(a)`` cancel in the ratio.  Centers run
    along ``e_1`` and ``trials - 1`` random directions with ``delta`` log-spaced from 0.1
    down to ``eps``; the constant functions give one extra trial.
    """
    factors = [f if isinstance(f, ProductFactor) else ProductFactor(*f) for f in factors]
    if not factors:
        raise ParameterError("at least one factor is required")
    n = mu.n
    lam, gamma = product_parameters(factors)
    c0 = 1.0 / weighted_volume(n, 0.0)
    sig = [2.0 * (1.0 + f.alpha / (n + 1)) / f.p + 1.0 for f in factors]
    total = sum(s_ * f.q for s_, f in zip(sig, factors))
    rng = np.random.default_rng(seed)
    deltas = np.geomspace(0.1, eps, count)
    radii = radius_for_delta(deltas)
    centers = []
    for k in range(trials):
        e = None if k == 0 else rng.standard_normal(n) + 1j * rng.standard_normal(n)
        centers.append(radial_point(n, radii, e))
    centers = np.concatenate(centers)
    da = one_minus_norm_sq(centers)
    # |k_a(w)|^sigma = c0^{sigma/2} da^{(n+1) sigma/2} |1 - <w,a>|^{-(n+1) sigma}
    log_den = np.zeros(centers.shape[0])
    for s_, f in zip(sig, factors):
        c = (n + 1) * s_ * f.p / 2
        integral = kernel_modulus_integral(n, centers, c, f.alpha)
        log_norm = (np.log(c0) * s_ * f.p / 2 + (n + 1) * s_ * f.p / 2 * np.log(da) + np.log(integral)) / f.p
        log_den += f.q * log_norm
    prefactor = c0 ** (total / 2) * da ** ((n + 1) * total / 2)
    if mu.discrete:
        if mu.weights.size:
            ip = np.tensordot(centers, np.conj(mu.points), axes=([-1], [-1]))
            num = prefactor * (np.abs(1.0 - ip) ** (-(n + 1) * total) @ mu.weights)
        else:
            num = np.zeros(centers.shape[0])
    else:
        num = prefactor * mu.scale * kernel_modulus_integral(n, centers, (n + 1) * total / 2, mu.exponent)
    ratios = num / np.exp(log_den)
    const_ratio = mu.total_mass / math.prod(weighted_volume(n, f.alpha) ** (f.q / f.p) for f in factors)
    d_all = np.tile(deltas, trials)
    fit = envelope_fit(d_all, ratios, window)
    bounded = bool(np.all(ratios == 0) or (depth_ok(fit, window) and fit.slope >= -tol))
    return ProductResult(lam, gamma, float(max(np.max(ratios), const_ratio)), float(const_ratio), fit,
                         bounded, d_all, ratios)


__all__ = [
    "Measure",
    "CarlesonParams",
    "Diagnostic",
    "ProductFactor",
    "ProductResult",
    "ball_mass",
    "mu_hat",
    "berezin_level",
    "berezin_transform",
    "standard_grid",
    "skew_carleson_diagnostic",
    "skew_carleson_norm",
    "classify_skew_carleson",
    "lattice_diagnostic",
    "berezin_diagnostic",
    "reweight",
    "product_parameters",
    "product_carleson_test",
]
