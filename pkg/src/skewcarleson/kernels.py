"""Weighted Bergman kernels of the unit ball and the functions built from them.

All kernels use the smooth weight ``(1 - |w|^2)^beta``, for which

    K_beta(z, w) = c_{n,beta} (1 - <z, w>)^{-(n+1+beta)}

is exact.  The normalising constant is obtained by requiring that the
projection reproduces the constant function 1, i.e. ``c = 1/nu_beta(B)``,
with ``nu_beta(B)`` computed by Gauss-Jacobi quadrature; the Gamma-function
formula ``Gamma(n+beta+1) / (pi^n Gamma(beta+1))`` is kept as a cross-check.

Several integrals of kernel powers against radial weights have closed
forms in terms of ``2F1``; they all follow from expanding
``(1 - <w, z>)^{-c}`` in homogeneous polynomials and the moment identity

    int <z, w>^m <w, a>^m (1 - |w|^2)^t dnu(w)
        = <z, a>^m pi^n m! Gamma(t+1) / Gamma(n+m+t+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, hyp2f1, roots_jacobi

from .errors import EvaluationError, ParameterError
from .geometry import as_points, check_inside, inner, norm_sq, one_minus_norm_sq
from .quadrature import QuadratureRule, default_rule, evaluate, integrate

_CONSTANT_TOL = 1e-12


# evaluation points per block when summing kernels over quadrature nodes
_EVAL_CHUNK = 512


def weighted_volume(n: int, t: float) -> float:
    """``int_B (1 - |w|^2)^t dnu = pi^n Gamma(t+1) / Gamma(n+t+1)``."""
    if t <= -1:
        raise ParameterError(f"weight exponent must exceed -1, got {t}")
    return math.exp(n * math.log(math.pi) + gammaln(t + 1.0) - gammaln(n + t + 1.0))


def _gauss_jacobi_volume(n: int, beta: float) -> float:
    # nu_beta(B) = pi^n/(n-1)! int_0^1 (1-x)^beta x^(n-1) dx, exact for n nodes
    y, w = roots_jacobi(max(n, 2), beta, 0.0)
    x = 0.5 * (1.0 + y)
    integral = 0.5 ** (beta + 1.0) * float(np.sum(w * x ** (n - 1)))
    return math.pi ** n / math.factorial(n - 1) * integral


@dataclass(frozen=True)
class KernelParams:
    """Dimension and weight of the kernel ``K_beta`` on the ball of C^n."""

    n: int = 1
    beta: float = 0.0
    constant: float = field(init=False)
    constant_check: float = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.n!r}")
        if not self.beta > -1:
            raise ParameterError(f"kernel weight beta must exceed -1, got {self.beta}")
        c = 1.0 / _gauss_jacobi_volume(self.n, self.beta)
        closed = 1.0 / weighted_volume(self.n, self.beta)
        if abs(c - closed) > _CONSTANT_TOL * closed:
            raise EvaluationError(
                f"kernel constant failed certification: quadrature {c!r} vs closed form {closed!r}"
            )
        object.__setattr__(self, "constant", c)
        object.__setattr__(self, "constant_check", abs(c - closed) / closed)

    @property
    def order(self) -> float:
        """Singularity order ``n + 1 + beta``."""
        return self.n + 1.0 + self.beta


@dataclass(frozen=True)
class SpaceParams:
    """Exponents of the weighted Bergman space ``A^p_alpha``."""

    p: float
    alpha: float = 0.0

    def __post_init__(self):
        if not self.p > 0:
            raise ParameterError(f"p must be positive, got {self.p}")
        if not self.alpha > -1:
            raise ParameterError(f"alpha must exceed -1, got {self.alpha}")

    def theta(self, n: int) -> float:
        return 1.0 + self.alpha / (n + 1)

    def conjugate(self, beta: float) -> "SpaceParams":
        """The dual space ``A^{p'}_{alpha'}`` under the pairing of weight ``beta``."""
        p_dual, alpha_dual = pairing_exponent(self.p, self.alpha, beta)
        return SpaceParams(p_dual, alpha_dual)


def _points_pair(kp, z, w):
    z = check_inside(z, kp.n)
    w = check_inside(w, kp.n)
    return z, w


def bergman_kernel(kp: KernelParams, z, w):
    """``K_beta(z, w)``, holomorphic in ``z``; broadcasts over leading axes."""
    z, w = _points_pair(kp, z, w)
    val = kp.constant * (1.0 - inner(z, w)) ** (-kp.order)
    return val.item() if np.ndim(val) == 0 else val


def kernel_diagonal(kp: KernelParams, a):
    """``K_beta(a, a) = c / (1 - |a|^2)^{n+1+beta}``."""
    a = check_inside(a, kp.n)
    val = kp.constant * one_minus_norm_sq(a) ** (-kp.order)
    return val.item() if np.ndim(val) == 0 else val


def normalized_kernel(kp: KernelParams, a, z):
    """``k_{beta,a}(z) = K_beta(z, a) / sqrt(K_beta(a, a))``."""
    a = check_inside(a, kp.n)
    z = check_inside(z, kp.n)
    da = one_minus_norm_sq(a)
    val = math.sqrt(kp.constant) * da ** (kp.order / 2) * (1.0 - inner(z, a)) ** (-kp.order)
    return val.item() if np.ndim(val) == 0 else val


def kernel_modulus_integral(n: int, z, c: float, t: float):
    """``int |1 - <w, z>|^{-2c} (1 - |w|^2)^t dnu(w)`` in closed form.

    Equals ``pi^n Gamma(t+1)/Gamma(n+t+1) 2F1(c, c; n+1+t; |z|^2)``.
    """
    z = check_inside(z, n)
    return weighted_volume(n, t) * hyp2f1(c, c, n + 1.0 + t, norm_sq(z))


def kernel_power_integral(kp: KernelParams, z0, p: float, alpha: float):
    """Closed form of ``int |K_beta(w, z0)|^p (1 - |w|^2)^alpha dnu(w)``."""
    if p <= 0:
        raise ParameterError(f"p must be positive, got {p}")
    return kp.constant ** p * kernel_modulus_integral(kp.n, z0, p * kp.order / 2, alpha)


def theorem_exponent(kp: KernelParams, p: float, alpha: float) -> float:
    """Boundary exponent ``alpha - beta - (n+1+beta)(p-1)`` of the kernel integral."""
    return alpha - kp.beta - kp.order * (p - 1.0)


def kernel_integral_estimate(kp: KernelParams, z0, p: float, alpha: float,
                             rule: QuadratureRule | None = None, convention: str = "smooth"):
    """``int |K_beta(w, z0)|^p delta(w)^alpha dnu(w)``.

    Requires ``alpha - beta < (n+1+beta)(p-1)``, the range in which the
    integral grows like ``delta(z0)^{alpha-beta-(n+1+beta)(p-1)}``.  With
    ``rule=None`` the closed form is used (smooth convention only);
    otherwise the rule is re-centred at ``z0`` and applied.
    """
    if not alpha > -1:
        raise ParameterError(f"alpha must exceed -1, got {alpha}")
    if not alpha - kp.beta < kp.order * (p - 1.0):
        raise ParameterError(
            "kernel integral estimate needs alpha - beta < (n+1+beta)(p-1); "
            f"got alpha - beta = {alpha - kp.beta:g}, (n+1+beta)(p-1) = {kp.order * (p - 1.0):g}"
        )
    z0 = check_inside(z0, kp.n).reshape(-1)
    if rule is None:
        if convention != "smooth":
            raise ParameterError("the closed form needs the smooth weight; pass a quadrature rule")
        return float(kernel_power_integral(kp, z0, p, alpha))
    local = rule.centered(z0)
    est, _ = integrate(
        local,
        lambda w: np.abs(kp.constant * (1.0 - inner(w, z0)) ** (-kp.order)) ** p,
        alpha,
        convention,
    )
    return est


# ----------------------------------------------------------------------------
# functions on the ball
# ----------------------------------------------------------------------------

class KernelSum:
    """``f(z) = sum_k c_k K_beta(z, a_k)``."""

    def __init__(self, kp: KernelParams, centers, coeffs=None):
        self.kp = kp
        self.centers = check_inside(centers, kp.n).reshape(-1, kp.n)
        m = self.centers.shape[0]
        self.coeffs = np.ones(m, dtype=complex) if coeffs is None else np.asarray(coeffs, dtype=complex).reshape(m)

    def __call__(self, z):
        z = as_points(z, self.kp.n)
        ip = np.tensordot(z, np.conj(self.centers), axes=([-1], [-1]))
        vals = self.kp.constant * (1.0 - ip) ** (-self.kp.order)
        return vals @ self.coeffs

    def scaled(self, s) -> "KernelSum":
        return KernelSum(self.kp, self.centers, self.coeffs * s)


class Polynomial:
    """Holomorphic polynomial ``sum_m c_m z^m`` over multi-indices ``m``."""

    def __init__(self, n: int, terms: dict):
        self.n = n
        self.terms = {tuple(int(i) for i in k): complex(v) for k, v in terms.items() if v != 0}
        for k in self.terms:
            if len(k) != n or min(k) < 0:
                raise ParameterError(f"invalid multi-index {k} for dimension {n}")

    @classmethod
    def monomial(cls, n: int, index, coeff=1.0) -> "Polynomial":
        if n == 1 and np.ndim(index) == 0:
            index = (int(index),)
        return cls(n, {tuple(index): coeff})

    def __call__(self, z):
        z = as_points(z, self.n)
        out = np.zeros(z.shape[:-1], dtype=complex)
        for k, c in self.terms.items():
            out = out + c * np.prod(z ** np.asarray(k), axis=-1)
        return out

    def degrees(self) -> dict:
        """Homogeneous parts keyed by total degree."""
        parts: dict = {}
        for k, c in self.terms.items():
            parts.setdefault(sum(k), {})[k] = c
        return parts

    def map_degrees(self, multiplier) -> "Polynomial":
        """Scale each homogeneous part of degree ``d`` by ``multiplier(d)``."""
        return Polynomial(self.n, {k: c * multiplier(sum(k)) for k, c in self.terms.items()})


def monomial_norm_sq(n: int, index, alpha: float) -> float:
    """``||z^m||_{2,alpha}^2 = pi^n m! Gamma(alpha+1) / Gamma(n+|m|+alpha+1)``."""
    index = np.atleast_1d(index)
    logfact = float(np.sum(gammaln(index + 1.0)))
    k = float(np.sum(index))
    return math.exp(n * math.log(math.pi) + logfact + gammaln(alpha + 1.0) - gammaln(n + k + alpha + 1.0))


def polynomial_norm(poly: Polynomial, alpha: float) -> float:
    """Exact ``A^2_alpha`` norm of a polynomial (monomials are orthogonal)."""
    return math.sqrt(sum(abs(c) ** 2 * monomial_norm_sq(poly.n, k, alpha) for k, c in poly.terms.items()))


def kernel_gram(kp: KernelParams, centers_a, centers_b, alpha: float) -> np.ndarray:
    """``<K_beta(., a_i), K_beta(., b_j)>`` in ``L^2((1-|w|^2)^alpha dnu)``.

    Closed form ``c^2 V_alpha 2F1(b, b; n+1+alpha; <b_j, a_i>)`` with
    ``b = n+1+beta`` and ``V_alpha`` the weighted ball volume.
    """
    a = check_inside(centers_a, kp.n).reshape(-1, kp.n)
    b = check_inside(centers_b, kp.n).reshape(-1, kp.n)
    x = np.conj(np.tensordot(a, np.conj(b), axes=([-1], [-1])))
    return kp.constant ** 2 * weighted_volume(kp.n, alpha) * hyp2f1(kp.order, kp.order, kp.n + 1.0 + alpha, x)


def kernel_sum_norm2(f: KernelSum, alpha: float) -> float:
    """Exact ``||f||_{2,alpha}`` for a kernel sum."""
    g = kernel_gram(f.kp, f.centers, f.centers, alpha)
    val = float(np.real(np.conj(f.coeffs) @ g.T @ f.coeffs))
    return math.sqrt(max(val, 0.0))


# ----------------------------------------------------------------------------
# projection, pairing, norms
# ----------------------------------------------------------------------------

def bergman_project(kp: KernelParams, f, z, rule: QuadratureRule | None = None):
    """``P_beta f(z) = int K_beta(z, w) f(w) (1 - |w|^2)^beta dnu(w)`` by quadrature."""
    if rule is None:
        rule = default_rule(kp.n)
    z = check_inside(z, kp.n)
    flat = z.reshape(-1, kp.n)
    vals = evaluate(rule, f)
    w = rule.weights * rule.smooth_delta ** kp.beta * vals
    out = np.empty(flat.shape[0], dtype=complex)
    for i in range(0, flat.shape[0], _EVAL_CHUNK):
        ip = np.tensordot(flat[i:i + _EVAL_CHUNK], np.conj(rule.nodes), axes=([-1], [-1]))
        out[i:i + _EVAL_CHUNK] = kp.constant * ((1.0 - ip) ** (-kp.order)) @ w
    out = out.reshape(z.shape[:-1])
    return out.item() if out.ndim == 0 else out


def pairing_exponent(p: float, alpha: float, beta: float):
    """Dual exponents ``(p', alpha')`` with ``beta = alpha/p + alpha'/p'``."""
    if not p > 1:
        raise ParameterError(f"the duality pairing needs p > 1 (conjugate exponent undefined), got p = {p}")
    p_dual = p / (p - 1.0)
    return p_dual, p_dual * (beta - alpha / p)


def duality_pairing(f, g, beta: float, rule: QuadratureRule | None = None, n: int = 1,
                    space: SpaceParams | None = None):
    """``(f, g)_beta = int f conj(g) (1 - |w|^2)^beta dnu``.

    ``space`` is the space of ``f``; when given, the pairing is checked to
    be the duality between ``A^p_alpha`` and ``A^{p'}_{alpha'}``.
    """
    if space is not None:
        pairing_exponent(space.p, space.alpha, beta)
    if not beta > -1:
        raise ParameterError(f"pairing weight must exceed -1, got {beta}")
    if rule is None:
        rule = default_rule(n)
    est, _ = integrate(rule, lambda w: f(w) * np.conj(g(w)), beta)
    return complex(est)


def norm(f, sp: SpaceParams, rule: QuadratureRule | None = None, n: int = 1,
         convention: str = "smooth") -> float:
    """``||f||_{p,alpha}`` by quadrature."""
    if rule is None:
        rule = default_rule(n)
    est, _ = integrate(rule, lambda w: np.abs(f(w)) ** sp.p, sp.alpha, convention)
    return float(est) ** (1.0 / sp.p)


def kernel_norm(kp: KernelParams, a, sp: SpaceParams):
    """Closed form ``||K_beta(., a)||_{p,alpha}`` (smooth weight)."""
    return kernel_power_integral(kp, a, sp.p, sp.alpha) ** (1.0 / sp.p)


__all__ = [
    "KernelParams",
    "SpaceParams",
    "KernelSum",
    "Polynomial",
    "weighted_volume",
    "bergman_kernel",
    "kernel_diagonal",
    "normalized_kernel",
    "kernel_modulus_integral",
    "kernel_power_integral",
    "kernel_integral_estimate",
    "theorem_exponent",
    "monomial_norm_sq",
    "polynomial_norm",
    "kernel_gram",
    "kernel_sum_norm2",
    "bergman_project",
    "pairing_exponent",
    "duality_pairing",
    "norm",
    "kernel_norm",
]
