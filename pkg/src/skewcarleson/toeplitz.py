"""Toeplitz operators ``T_mu^beta f(z) = int K_beta(z, w) f(w) dmu(w)``.

For a radial density ``mu = s (1 - |w|^2)^t dnu`` the operator is diagonal
on homogeneous polynomials, multiplying the degree-``m`` part by

    lam_m = s Gamma(t+1) Gamma(n+1+beta+m) / (Gamma(beta+1) Gamma(n+1+t+m)),

so ``T`` maps ``K_beta(., a)`` to ``s c V_t 2F1(b, b; n+1+t; <z, a>)`` and all
``A^2`` norms of images of kernel sums reduce to power series in
``<a_j, a_k>``.  For discrete measures ``T f`` is itself a finite kernel
sum.  Norms with exponent other than 2 fall back to quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, hyp2f1

from .errors import BranchError, DivergenceError, HypothesisWarning, ParameterError
from .fitting import FIT_WINDOW, SLOPE_TOL, Fit, envelope_fit, loglog_fit
from .geometry import (
    boundary_sequence,
    check_inside,
    one_minus_norm_sq,
    radial_point,
    radius_for_delta,
)
from .kernels import (
    KernelParams,
    KernelSum,
    Polynomial,
    SpaceParams,
    kernel_gram,
    kernel_norm,
    monomial_norm_sq,
    weighted_volume,
)
from .measures import CarlesonParams, Measure, ball_mass
from .quadrature import QuadratureRule, default_rule, disk_rule, integrate

FAMILY_KINDS = ("kernel_probe", "atom_probe", "vanishing_probe", "polynomial")
_EVAL_CHUNK = 512
_SERIES_CHUNK = 8192
_SERIES_CAP = 4_000_000


@dataclass(frozen=True)
class OperatorParams:
    """Exponents of ``T_mu^beta : A^{p1}_{alpha1} -> A^{p2}_{alpha2}``."""

    p1: float
    alpha1: float
    p2: float
    alpha2: float
    beta: float
    n: int = 1
    lam: float = field(init=False)
    gamma: float | None = field(init=False)
    hypothesis: tuple = field(init=False)

    def __post_init__(self):
        for name in ("p1", "p2"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("alpha1", "alpha2", "beta"):
            if not getattr(self, name) > -1:
                raise ParameterError(f"{name} must exceed -1, got {getattr(self, name)}")
        lam = 1.0 + 1.0 / self.p1 - 1.0 / self.p2
        gamma = None if lam == 0 else (self.beta + self.alpha1 / self.p1 - self.alpha2 / self.p2) / lam
        n = self.n
        hyp = tuple(
            bool(n + 1 + self.beta > n * max(1.0, 1.0 / p) + (1.0 + a) / p)
            for p, a in ((self.p1, self.alpha1), (self.p2, self.alpha2))
        )
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "hypothesis", hyp)

    @property
    def hypothesis_ok(self) -> bool:
        return all(self.hypothesis)

    @property
    def banner(self) -> str:
        if self.hypothesis_ok:
            return ""
        bad = [str(j + 1) for j, ok in enumerate(self.hypothesis) if not ok]
        return f"hypothesis violated for j = {', '.join(bad)}: n+1+beta <= n max(1, 1/p_j) + (1+alpha_j)/p_j"

    @property
    def theta(self) -> float | None:
        return None if self.gamma is None else 1.0 + self.gamma / (self.n + 1)

    @property
    def kernel(self) -> KernelParams:
        return KernelParams(self.n, self.beta)

    @property
    def source(self) -> SpaceParams:
        return SpaceParams(self.p1, self.alpha1)

    @property
    def target(self) -> SpaceParams:
        return SpaceParams(self.p2, self.alpha2)

    def carleson(self, r: float = 0.5) -> CarlesonParams:
        if self.gamma is None:
            return CarlesonParams(0.0, None, r, self.n)
        return CarlesonParams(self.lam, self.gamma, r, self.n)

    def exponent_identity_defect(self) -> float:
        """``(n+1+beta) + (n+1+alpha1)/p1 - (n+1+alpha2)/p2 - (n+1+gamma) lam``."""
        n = self.n
        lhs = (n + 1 + self.beta) + (n + 1 + self.alpha1) / self.p1 - (n + 1 + self.alpha2) / self.p2
        return lhs - (n + 1 + (self.gamma or 0.0)) * self.lam

    def as_dict(self) -> dict:
        return {
            "p1": self.p1, "alpha1": self.alpha1, "p2": self.p2, "alpha2": self.alpha2,
            "beta": self.beta, "n": self.n, "lam": self.lam, "gamma": self.gamma,
            "theta": self.theta, "hypothesis": list(self.hypothesis),
            "hypothesis_ok": self.hypothesis_ok,
        }


def derive_params(p1, alpha1, p2, alpha2, beta, n: int = 1) -> OperatorParams:
    """Parameter map ``lam = 1 + 1/p1 - 1/p2``, ``gamma lam = beta + alpha1/p1 - alpha2/p2``."""
    return OperatorParams(float(p1), float(alpha1), float(p2), float(alpha2), float(beta), n)


@dataclass(frozen=True)
class TestFunctionFamily:
    """Structured test functions used by the operator-norm probes."""

    kind: str = "kernel_probe"
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ParameterError(f"test family must be one of {FAMILY_KINDS}, got {self.kind!r}")

    @staticmethod
    def atom_tau(op: OperatorParams) -> float:
        n = op.n
        return (n + 1 + op.beta) / 2 - (n + 1 + op.alpha1) / op.p1

    @staticmethod
    def vanishing_exponent(op: OperatorParams) -> float:
        n = op.n
        return (n + 1 + op.beta) - (n + 1 + op.alpha1) / op.p1


# ----------------------------------------------------------------------------
# action of T
# ----------------------------------------------------------------------------

def radial_multiplier(mu: Measure, beta: float, m):
    """Eigenvalue of ``T_mu^beta`` on homogeneous polynomials of degree ``m``."""
    if mu.discrete:
        raise ParameterError("multipliers exist only for radial densities")
    m = np.asarray(m, dtype=float)
    n, t = mu.n, mu.exponent
    log = (gammaln(t + 1.0) - gammaln(beta + 1.0)
           + gammaln(n + 1.0 + beta + m) - gammaln(n + 1.0 + t + m))
    return mu.scale * np.exp(log)


def _kernel_image(mu: Measure, f: KernelSum, z) -> np.ndarray:
    kp = f.kp
    n, t = mu.n, mu.exponent
    b = kp.order
    ip = np.tensordot(z, np.conj(f.centers), axes=([-1], [-1]))
    vals = hyp2f1(b, b, n + 1.0 + t, ip)
    return mu.scale * kp.constant ** 2 * weighted_volume(n, t) * (vals @ f.coeffs)


def toeplitz_image(mu: Measure, beta: float, f):
    """``T_mu^beta f`` as a callable, in closed form whenever possible."""
    kp = KernelParams(mu.n, beta)
    if mu.discrete:
        if mu.weights.size == 0:
            return KernelSum(kp, np.zeros((1, mu.n)), np.zeros(1))
        vals = np.asarray(f(mu.points), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise DivergenceError("test function is not finite at an atom")
        return KernelSum(kp, mu.points, mu.weights * vals)
    if isinstance(f, Polynomial):
        return f.map_degrees(lambda d: float(radial_multiplier(mu, beta, d)))
    if isinstance(f, KernelSum) and f.kp.beta == beta:
        return lambda z: _kernel_image(mu, f, z)
    return None


def apply_toeplitz(mu: Measure, beta: float, f, z, rule: QuadratureRule | None = None):
    """``T_mu^beta f(z)``: exact for atoms, closed form or quadrature for densities."""
    kp = KernelParams(mu.n, beta)
    z = check_inside(z, mu.n)
    image = toeplitz_image(mu, beta, f)
    if image is not None:
        out = np.asarray(image(z))
    else:
        if rule is None:
            rule = default_rule(mu.n)
        vals = np.asarray(f(rule.nodes), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise DivergenceError("test function is not finite at a quadrature node")
        w = rule.weights * mu.scale * rule.smooth_delta ** mu.exponent * vals
        flat = z.reshape(-1, mu.n)
        out = np.empty(flat.shape[0], dtype=complex)
        # bounded memory: at most _EVAL_CHUNK x nodes kernel entries at a time
        for i in range(0, flat.shape[0], _EVAL_CHUNK):
            ip = np.tensordot(flat[i:i + _EVAL_CHUNK], np.conj(rule.nodes), axes=([-1], [-1]))
            out[i:i + _EVAL_CHUNK] = (kp.constant * (1.0 - ip) ** (-kp.order)) @ w
        out = out.reshape(z.shape[:-1])
    if not np.all(np.isfinite(out)):
        raise DivergenceError("Toeplitz integral diverged for this measure and weight")
    return out.item() if out.ndim == 0 else out


# ----------------------------------------------------------------------------
# norms
# ----------------------------------------------------------------------------

def _series_norm2(kp: KernelParams, f: KernelSum, alpha: float, log_mult=None) -> float:
    """``|| sum_k c_k sum_m (b)_m/m! mult_m <., a_k>^m ||_{2,alpha}^2 * c^2``.

    ``log_mult(m)`` is the log of a real multiplier applied to degree ``m``.
    """
    n, b = kp.n, kp.order
    x = np.conj(np.tensordot(f.centers, np.conj(f.centers), axes=([-1], [-1])))
    cc = np.outer(f.coeffs, np.conj(f.coeffs))
    xmax = float(np.max(np.abs(x)))
    base = n * math.log(math.pi) + gammaln(alpha + 1.0) - 2 * gammaln(b)
    total = 0.0
    done = 0
    with np.errstate(divide="ignore"):
        logx = np.log(x.astype(complex))
    zero = x == 0
    while done < _SERIES_CAP:
        m = np.arange(done, done + _SERIES_CHUNK, dtype=float)
        lt = base + 2 * gammaln(b + m) - gammaln(m + 1.0) - gammaln(n + m + alpha + 1.0)
        if log_mult is not None:
            lt = lt + 2 * log_mult(m)
        if xmax == 0.0:
            return float(kp.constant ** 2 * np.real(np.sum(cc)) * math.exp(lt[0]))
        with np.errstate(invalid="ignore"):
            powers = np.exp(m[:, None, None] * logx[None, :, :])
        powers = np.where(zero[None, :, :], (m == 0)[:, None, None], powers)
        chunk = np.real(np.einsum("m,mjk,jk->", np.exp(lt), powers, cc))
        total += chunk
        last = float(lt[-1]) + float(m[-1]) * math.log(xmax)
        prev = float(lt[-2]) + float(m[-2]) * math.log(xmax)
        done += _SERIES_CHUNK
        # remainder of an eventually geometric tail
        if last <= prev and math.exp(last) / max(1.0 - xmax, 1e-300) < 1e-16 * abs(total):
            break
    else:
        raise DivergenceError("kernel series did not converge within the term budget")
    return float(kp.constant ** 2 * total)


def _quadrature_norm(g, sp: SpaceParams, rule: QuadratureRule) -> float:
    est, _ = integrate(rule, lambda w: np.abs(g(w)) ** sp.p, sp.alpha)
    return float(est) ** (1.0 / sp.p)


def _local_rule(f, n: int, rule: QuadratureRule | None) -> QuadratureRule:
    base = rule if rule is not None else (disk_rule(64, 256) if n == 1 else default_rule(n))
    if isinstance(f, KernelSum) and f.centers.shape[0] == 1:
        return base.centered(f.centers[0])
    return base


def function_norm(f, sp: SpaceParams, n: int = 1, rule: QuadratureRule | None = None) -> float:
    """``||f||_{p,alpha}`` using exact formulas when available."""
    if isinstance(f, KernelSum) and sp.p == 2:
        if f.centers.shape[0] == 1 and f.coeffs[0] != 0:
            return abs(f.coeffs[0]) * kernel_norm(f.kp, f.centers[0], sp)
        return math.sqrt(max(_series_norm2(f.kp, f, sp.alpha), 0.0))
    if isinstance(f, KernelSum) and f.centers.shape[0] == 1:
        return abs(f.coeffs[0]) * float(kernel_norm(f.kp, f.centers[0], sp))
    if isinstance(f, Polynomial) and sp.p == 2:
        return math.sqrt(sum(abs(c) ** 2 * monomial_norm_sq(f.n, k, sp.alpha) for k, c in f.terms.items()))
    return _quadrature_norm(f, sp, _local_rule(f, n, rule))


def image_norm(mu: Measure, beta: float, f, sp: SpaceParams, rule: QuadratureRule | None = None) -> float:
    """``||T_mu^beta f||_{p,alpha}``."""
    n = mu.n
    if mu.is_zero:
        return 0.0
    image = toeplitz_image(mu, beta, f)
    if mu.discrete:
        if sp.p == 2:
            g = kernel_gram(image.kp, image.centers, image.centers, sp.alpha)
            return math.sqrt(max(float(np.real(np.conj(image.coeffs) @ g.T @ image.coeffs)), 0.0))
        return _quadrature_norm(image, sp, _local_rule(image, n, rule))
    if isinstance(f, Polynomial):
        return function_norm(image, sp, n, rule)
    if isinstance(f, KernelSum) and f.kp.beta == beta and sp.p == 2:
        t = mu.exponent
        log_s = math.log(mu.scale) if mu.scale > 0 else -math.inf

        def log_mult(m):
            return (log_s + gammaln(t + 1.0) - gammaln(beta + 1.0)
                    + gammaln(n + 1.0 + beta + m) - gammaln(n + 1.0 + t + m))

        return math.sqrt(max(_series_norm2(f.kp, f, sp.alpha, log_mult), 0.0))
    local = _local_rule(f, n, rule)
    if image is not None:
        return _quadrature_norm(image, sp, local)
    return _quadrature_norm(lambda z: apply_toeplitz(mu, beta, f, z), sp, local)


def source_norm(f, op: OperatorParams, mu: Measure | None = None, rule=None) -> float:
    """``||f||_{p1,alpha1}``; kernel sums use the same series as their images when ``p1 = 2``."""
    sp = op.source
    if isinstance(f, KernelSum) and sp.p == 2 and f.kp.beta == op.beta:
        return math.sqrt(max(_series_norm2(f.kp, f, sp.alpha), 0.0))
    return function_norm(f, sp, op.n, rule)


# ----------------------------------------------------------------------------
# probes
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBound:
    """Quantities of the lower-bound chain at one center ``a``."""

    probe: float
    ball_mass: float
    delta: float
    toeplitz_at_center: float
    test_norm: float
    chain_ratio: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lower_bound_probe(mu: Measure, op: OperatorParams, a, r: float = 0.5,
                      max_delta: float = 0.1) -> LowerBound:
    """``mu(B(a,r)) / delta(a)^{(n+1+gamma) lam}`` with the intermediate chain values.

    ``toeplitz_at_center`` is ``T f_a(a)`` for ``f_a = K_beta(., a)``;
    ``chain_ratio = T f_a(a) delta(a)^{2(n+1+beta)} / mu(B(a,r))`` stays
    bounded below along the boundary when the chain holds.
    """
    if op.lam < 1:
        raise BranchError("the lower-bound probe needs lam >= 1; use the lattice diagnostic for lam < 1")
    n = op.n
    a = check_inside(a, n).reshape(-1)
    da = float(one_minus_norm_sq(a))
    if da > max_delta * (1 + 1e-9):
        raise ParameterError(f"the lower-bound probe needs delta(a) <= {max_delta:g}, got {da:.3g}")
    mass = float(ball_mass(mu, a, r))
    kp = op.kernel
    fa = KernelSum(kp, a[None, :])
    tfa = float(np.real(apply_toeplitz(mu, op.beta, fa, a))) if not mu.is_zero else 0.0
    fnorm = float(kernel_norm(kp, a, op.source))
    probe = mass / da ** ((n + 1 + op.gamma) * op.lam)
    chain = tfa * da ** (2 * kp.order) / mass if mass > 0 else math.inf
    return LowerBound(probe, mass, da, tfa, fnorm, chain)


def probe_centers(n: int = 1, eps: float = 1e-3, count: int = 13, top: float = 0.1,
                  directions: int = 1, seed: int = 0, interior=(1.0, 0.5, 0.25)) -> tuple[np.ndarray, np.ndarray]:
    """Kernel-probe centers: interior points plus a log-spaced boundary ray per direction."""
    rng = np.random.default_rng(seed)
    deltas = np.concatenate([np.asarray(interior, dtype=float), np.geomspace(top, eps, count)])
    pts, ds = [], []
    for k in range(directions):
        e = None if k == 0 else rng.standard_normal(n) + 1j * rng.standard_normal(n)
        pts.append(radial_point(n, radius_for_delta(deltas), e))
        ds.append(deltas)
    return np.concatenate(pts), np.concatenate(ds)


@dataclass(frozen=True)
class NormEstimate:
    """Lower estimate of the operator norm with its per-family evidence."""

    value: float
    by_family: dict
    fit: Fit
    delta: np.ndarray = field(repr=False)
    kernel_ratios: np.ndarray = field(repr=False)
    skipped: tuple = ()
    banner: str = ""

    def summary(self) -> dict:
        return {
            "value": self.value,
            "by_family": dict(self.by_family),
            "slope": self.fit.slope,
            "residual": self.fit.residual,
            "deepest_delta": float(np.min(self.delta)) if self.delta.size else None,
            "skipped": list(self.skipped),
            "banner": self.banner,
        }


def _ratio(mu, op, f, rule):
    den = source_norm(f, op, mu, rule)
    if not den > 0:
        return None
    return image_norm(mu, op.beta, f, op.target, rule) / den


def estimate_operator_norm(mu: Measure, op: OperatorParams, family=None, trials: int = 4,
                           eps: float = 1e-3, seed: int = 0, rule: QuadratureRule | None = None,
                           max_degree: int = 48, window=FIT_WINDOW) -> NormEstimate:
    """``max ||T f||_{p2,alpha2} / ||f||_{p1,alpha1}`` over structured test families.

    ``family`` is a :class:`TestFunctionFamily`, a list of them, or ``None``
    for kernel probes, atom probes and polynomials together.
    """
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    if family is None:
        families = [TestFunctionFamily("kernel_probe"), TestFunctionFamily("atom_probe"),
                    TestFunctionFamily("polynomial")]
    elif isinstance(family, TestFunctionFamily):
        families = [family]
    else:
        families = list(family)
    if not op.hypothesis_ok:
        warnings.warn(op.banner, HypothesisWarning, stacklevel=2)
    n = op.n
    kp = op.kernel
    rng = np.random.default_rng(seed)
    by_family: dict = {}
    skipped: list = []
    ratios_k = np.zeros(0)
    deltas_k = np.zeros(0)
    for fam in families:
        best = 0.0
        if fam.kind in ("kernel_probe", "vanishing_probe"):
            dirs = trials if mu.discrete else 1
            centers, deltas = probe_centers(n, eps, directions=dirs, seed=seed)
            vals = []
            for a in centers:
                rt = _ratio(mu, op, KernelSum(kp, a[None, :]), rule)
                if rt is None:
                    skipped.append(f"{fam.kind}: zero-norm test function at {a.tolist()}")
                    rt = 0.0
                vals.append(rt)
            vals = np.asarray(vals)
            if fam.kind == "kernel_probe":
                ratios_k, deltas_k = vals, deltas
            best = float(np.max(vals))
        elif fam.kind == "atom_probe":
            tau = fam.tau if fam.tau is not None else TestFunctionFamily.atom_tau(op)
            pool, pool_d = probe_centers(n, max(eps, 1e-2) if op.p1 == 2 and op.p2 == 2 else 0.05,
                                         count=8, directions=max(2, trials), seed=seed + 1)
            for _ in range(trials):
                k = min(6, pool.shape[0])
                idx = rng.choice(pool.shape[0], size=k, replace=False)
                c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
                c /= np.sum(np.abs(c) ** op.p1) ** (1.0 / op.p1)
                a = pool[idx]
                da = one_minus_norm_sq(a)
                # delta^tau k_{beta,a} = delta^{tau + b/2} K_beta(., a) / sqrt(c)
                coeff = c * da ** (tau + kp.order / 2) / math.sqrt(kp.constant)
                rt = _ratio(mu, op, KernelSum(kp, a, coeff), rule)
                if rt is None:
                    skipped.append("atom_probe: zero-norm combination")
                    continue
                best = max(best, rt)
        else:
            for m in range(max_degree + 1):
                rt = _ratio(mu, op, Polynomial.monomial(n, (m,) + (0,) * (n - 1)), rule)
                if rt is None:
                    skipped.append(f"polynomial: zero-norm monomial of degree {m}")
                    continue
                best = max(best, rt)
        by_family[fam.kind] = best
    fit = envelope_fit(deltas_k, ratios_k, window) if ratios_k.size else Fit(math.nan, math.nan, math.nan, 0, math.nan)
    value = max(by_family.values()) if by_family else 0.0
    return NormEstimate(float(value), by_family, fit, deltas_k, ratios_k, tuple(skipped), op.banner)


def radial_norm_exact(mu: Measure, op: OperatorParams, max_degree: int = 100_000) -> float:
    """Exact ``A^2_{alpha1} -> A^2_{alpha2}`` norm of ``T`` for a radial density.

    ``T`` is diagonal on homogeneous components and monomials of a fixed
    degree share the same norm ratio, so the norm is the supremum over
    degrees; it is taken over ``m <= max_degree``.
    """
    if mu.discrete or op.p1 != 2 or op.p2 != 2:
        raise ParameterError("the exact norm is available for radial densities on A^2 only")
    n = op.n
    m = np.arange(max_degree + 1, dtype=float)
    log_ratio = 0.5 * (gammaln(op.alpha2 + 1.0) - gammaln(op.alpha1 + 1.0)
                       + gammaln(n + m + op.alpha1 + 1.0) - gammaln(n + m + op.alpha2 + 1.0))
    vals = radial_multiplier(mu, op.beta, m) * np.exp(log_ratio)
    return float(np.max(vals))


@dataclass(frozen=True)
class CompactnessResult:
    slope: float
    verdict: str
    fit: Fit
    delta: np.ndarray = field(repr=False)
    norms: np.ndarray = field(repr=False)
    note: str = ""

    def summary(self) -> dict:
        return {"slope": self.slope, "verdict": self.verdict, "residual": self.fit.residual,
                "fit_points": self.fit.points, "deepest_delta": self.fit.deepest, "note": self.note}


def compactness_probe(mu: Measure, op: OperatorParams, centers=None, rule: QuadratureRule | None = None,
                      tol: float = SLOPE_TOL, window=FIT_WINDOW) -> CompactnessResult:
    """Decay exponent of ``||T f_k||_{p2,alpha2}`` for the normalised kernels ``f_k``.

    ``f_k = delta(a_k)^{(n+1+beta) - (n+1+alpha1)/p1} K_beta(., a_k)`` along
    ``a_k = (1 - 2^-k) e_1``, ``k = 1..10`` by default.
    """
    empty = np.zeros(0)
    if op.lam < 1:
        return CompactnessResult(math.nan, "vanishing", Fit(math.nan, math.nan, math.nan, 0, math.nan),
                                 empty, empty, "lam < 1: bounded operators are compact")
    n = op.n
    kp = op.kernel
    a = boundary_sequence(n) if centers is None else check_inside(centers, n).reshape(-1, n)
    da = one_minus_norm_sq(a)
    expo = TestFunctionFamily.vanishing_exponent(op)
    norms = np.array([
        image_norm(mu, op.beta, KernelSum(kp, ak[None, :], [dk ** expo]), op.target, rule)
        for ak, dk in zip(a, da)
    ])
    if mu.is_zero or not np.any(norms[(da >= window[0]) & (da <= window[1])] > 0):
        return CompactnessResult(math.inf, "vanishing", Fit(math.inf, 0.0, 0.0, 0, float(np.min(da))),
                                 da, norms, "images vanish near the boundary")
    fit = loglog_fit(da[(da >= window[0] * (1 - 1e-9)) & (da <= window[1])],
                     norms[(da >= window[0] * (1 - 1e-9)) & (da <= window[1])])
    if fit.points < 4:
        return CompactnessResult(fit.slope, "inconclusive", fit, da, norms, "too few centers for a fit")
    if fit.slope > tol:
        verdict = "vanishing"
    elif fit.slope < -tol:
        verdict = "not_carleson"
    else:
        verdict = "carleson"
    return CompactnessResult(fit.slope, verdict, fit, da, norms)


def adjoint_identity_defect(mu: Measure, beta: float, f, h, rule: QuadratureRule | None = None) -> float:
    """``|(T f, h)_beta - int conj(h) f dmu|`` for a discrete measure."""
    from .kernels import duality_pairing

    if not mu.discrete:
        raise ParameterError("the adjoint identity check uses a discrete measure")
    image = toeplitz_image(mu, beta, f)
    lhs = duality_pairing(image, h, beta, rule, mu.n)
    rhs = complex(np.sum(np.conj(h(mu.points)) * f(mu.points) * mu.weights))
    return abs(lhs - rhs)


__all__ = [
    "OperatorParams",
    "TestFunctionFamily",
    "LowerBound",
    "NormEstimate",
    "CompactnessResult",
    "derive_params",
    "radial_multiplier",
    "toeplitz_image",
    "apply_toeplitz",
    "function_norm",
    "image_norm",
    "source_norm",
    "lower_bound_probe",
    "probe_centers",
    "estimate_operator_norm",
    "radial_norm_exact",
    "compactness_probe",
    "adjoint_identity_defect",
]
