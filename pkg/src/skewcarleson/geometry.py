"""Kobayashi geometry of the unit ball in C^n.

Points are complex arrays whose last axis has length ``n``.  For the disk
(``n == 1``) plain complex scalars and 1-d arrays of scalars are accepted
as well.  The Kobayashi distance of the ball is ``artanh`` of the
pseudo-hyperbolic distance ``|phi_z(w)|``, so a Kobayashi ball of radius
``artanh(r)`` is the set ``{w : |phi_z(w)| < r}``; all ball parameters in
this package are the pseudo-hyperbolic radius ``r`` in (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import hyp2f1
from scipy.stats import qmc, norm as _normal

from .errors import DomainError, ParameterError, ResourceError

CONVENTIONS = ("smooth", "euclidean")


@dataclass(frozen=True)
class ModelDomain:
    """Open unit ball of complex dimension ``n``.

    ``weight_convention`` selects the boundary distance used in weights:
    ``"smooth"`` is ``1 - |z|^2`` and ``"euclidean"`` is ``1 - |z|``.
    """

    n: int = 1
    weight_convention: str = "smooth"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.n!r}")
        if self.weight_convention not in CONVENTIONS:
            raise ParameterError(
                f"weight_convention must be one of {CONVENTIONS}, got {self.weight_convention!r}"
            )

    @property
    def volume(self) -> float:
        """Lebesgue volume pi^n / n! of the ball."""
        return math.pi ** self.n / math.factorial(self.n)

    def delta(self, z):
        return boundary_distance(self, z)


DISK = ModelDomain(1, "smooth")


def as_points(z, n: int) -> np.ndarray:
    """Coerce ``z`` to a complex array with trailing axis ``n``."""
    arr = np.asarray(z, dtype=complex)
    if n == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.shape[-1] != n:
        raise ParameterError(f"expected points with {n} complex coordinates, got shape {arr.shape}")
    return arr


def _out(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def norm_sq(z) -> np.ndarray:
    z = np.asarray(z)
    return np.sum(z.real ** 2 + z.imag ** 2, axis=-1)


def inner(z, w) -> np.ndarray:
    """Hermitian product sum_j z_j conj(w_j) along the last axis."""
    return np.sum(np.asarray(z) * np.conj(w), axis=-1)


def one_minus_norm_sq(z) -> np.ndarray:
    """``1 - |z|^2`` evaluated as ``(1 - |z|)(1 + |z|)``."""
    r = np.sqrt(norm_sq(z))
    return (1.0 - r) * (1.0 + r)


def check_inside(z, n: int) -> np.ndarray:
    pts = as_points(z, n)
    r2 = norm_sq(pts)
    bad = ~np.isfinite(r2) | (r2 >= 1.0)
    if np.any(bad):
        first = pts[bad][0] if pts.ndim > 1 else pts
        raise DomainError(f"point {np.round(first, 6).tolist()} is not inside the unit ball")
    return pts


def boundary_distance(d: ModelDomain, z):
    """Boundary distance ``1 - |z|^2`` (smooth) or ``1 - |z|`` (euclidean)."""
    pts = check_inside(z, d.n)
    r = np.sqrt(norm_sq(pts))
    if d.weight_convention == "smooth":
        return _out((1.0 - r) * (1.0 + r))
    return _out(1.0 - r)


def delta_from_smooth(smooth, radius, convention: str):
    """Convert stored ``1 - |z|^2`` values to the requested convention."""
    if convention == "smooth":
        return smooth
    return smooth / (1.0 + radius)


def mobius(a, z) -> np.ndarray:
    """Involutive ball automorphism ``phi_a`` exchanging ``a`` and 0."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    n = a.shape[0]
    z = as_points(z, n)
    a2 = float(norm_sq(a))
    if a2 == 0.0:
        return -z
    za = inner(z, a)[..., None]
    proj = za / a2 * a
    s = math.sqrt((1.0 - math.sqrt(a2)) * (1.0 + math.sqrt(a2)))
    return (a - proj - s * (z - proj)) / (1.0 - za)


def one_minus_mobius_sq(a, z) -> np.ndarray:
    """``1 - |phi_a(z)|^2`` from the identity (1-|a|^2)(1-|z|^2)/|1-<z,a>|^2."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    z = as_points(z, a.shape[0])
    return one_minus_norm_sq(a) * one_minus_norm_sq(z) / np.abs(1.0 - inner(z, a)) ** 2


def mobius_jacobian(a, z) -> np.ndarray:
    """Real Jacobian determinant of ``phi_a`` at ``z``."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    n = a.shape[0]
    z = as_points(z, n)
    return (one_minus_norm_sq(a) / np.abs(1.0 - inner(z, a)) ** 2) ** (n + 1)


def pseudo_hyperbolic(z, w, n: int | None = None) -> np.ndarray:
    """Pseudo-hyperbolic distance ``|phi_z(w)|`` with broadcasting."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if n is None:
        n = z.shape[-1] if z.ndim else 1
    z = as_points(z, n)
    w = as_points(w, n)
    diff = norm_sq(z - w)
    zw = inner(w, z)
    # Cauchy-Schwarz defect; identically zero on the disk
    defect = np.maximum(norm_sq(z) * norm_sq(w) - np.abs(zw) ** 2, 0.0) if n > 1 else 0.0
    num = np.maximum(diff - defect, 0.0)
    return np.sqrt(num) / np.abs(1.0 - zw)


def kobayashi_radius(r) -> float:
    """Kobayashi radius ``0.5 log((1+r)/(1-r))`` of a pseudo-hyperbolic radius."""
    return np.arctanh(r)


def kobayashi_distance(d: ModelDomain, z, w):
    z = check_inside(z, d.n)
    w = check_inside(w, d.n)
    return _out(np.arctanh(np.minimum(pseudo_hyperbolic(z, w, d.n), 1.0)))


@dataclass(frozen=True)
class KobayashiBall:
    """``B_D(center, r)``: points at pseudo-hyperbolic distance below ``r``."""

    center: np.ndarray
    r: float
    n: int = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ParameterError(f"ball radius parameter must lie in (0, 1), got {self.r}")
        c = np.asarray(self.center, dtype=complex).reshape(-1)
        check_inside(c, c.shape[0])
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "n", c.shape[0])

    @property
    def kobayashi_radius(self) -> float:
        return float(np.arctanh(self.r))

    def contains(self, w):
        return _out(pseudo_hyperbolic(self.center, w, self.n) < self.r)

    def ellipsoid(self):
        """Euclidean center and the two semi-axes of the ball's image."""
        return euclidean_ellipsoid(self.center, self.r)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform samples (Lebesgue measure) from the ball."""
        c, r_par, r_perp = self.ellipsoid()
        n = self.n
        x = rng.standard_normal((count, 2 * n))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        x *= rng.random((count, 1)) ** (1.0 / (2 * n))
        u = x[:, :n] + 1j * x[:, n:]
        a2 = float(norm_sq(self.center))
        if a2 == 0.0:
            return c + r_par * u
        e = self.center / math.sqrt(a2)
        par = inner(u, e)[:, None] * e
        return c + r_par * par + r_perp * (u - par)


def euclidean_ellipsoid(a, r):
    """Center and semi-axes (complex-normal, complex-tangential) of ``phi_a(rB)``."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    a2 = float(norm_sq(a))
    da = float(one_minus_norm_sq(a))
    denom = 1.0 - r * r * a2
    c = (1.0 - r * r) * a / denom
    r_par = r * da / denom
    r_perp = r * math.sqrt(da / denom)
    return c, r_par, r_perp


def unweighted_ball_volume(n: int, centers, r: float) -> np.ndarray:
    """Closed form ``(pi^n/n!) r^{2n} ((1-|z|^2)/(1-r^2|z|^2))^{n+1}``."""
    pts = as_points(centers, n)
    da = one_minus_norm_sq(pts)
    a2 = norm_sq(pts)
    return math.pi ** n / math.factorial(n) * r ** (2 * n) * (da / (1.0 - r * r * a2)) ** (n + 1)


_GL_RADIAL = 48


def smooth_weighted_ball_volume(n: int, centers, r: float, beta: float) -> np.ndarray:
    """``int_{B(z,r)} (1-|w|^2)^beta dnu`` for an array of centers.

    Pulling back by ``phi_z`` and averaging over spheres reduces the
    integral to ``(1-|z|^2)^{n+1+beta} |S^{2n-1}| int_0^r (1-t^2)^beta
    t^{2n-1} 2F1(c, c; n; t^2 |z|^2) dt`` with ``c = n+1+beta``.
    """
    if beta <= -1:
        raise ParameterError(f"weight exponent must exceed -1, got {beta}")
    pts = as_points(centers, n)
    if beta == 0:
        return unweighted_ball_volume(n, pts, r)
    x, w = np.polynomial.legendre.leggauss(_GL_RADIAL)
    t = 0.5 * r * (x + 1.0)
    w = 0.5 * r * w
    c = n + 1.0 + beta
    a2 = norm_sq(pts)[..., None]
    integrand = (1.0 - t * t) ** beta * t ** (2 * n - 1) * hyp2f1(c, c, n, t * t * a2)
    sphere = 2.0 * math.pi ** n / math.factorial(n - 1)
    return one_minus_norm_sq(pts) ** c * sphere * np.sum(integrand * w, axis=-1)


def _pullback_ball_volume(n, center, r, beta, convention, angular=256, qmc_points=2 ** 16, seed=0):
    """Weighted volume by quadrature over ``phi_z`` of the Euclidean r-ball."""
    center = np.asarray(center, dtype=complex).reshape(-1)
    if n == 1:
        x, w = np.polynomial.legendre.leggauss(_GL_RADIAL)
        rho = 0.5 * r * (x + 1.0)
        wr = 0.5 * r * w * rho
        theta = 2.0 * np.pi * (np.arange(angular) + 0.5) / angular
        u = (rho[:, None] * np.exp(1j * theta)[None, :]).reshape(-1, 1)
        weights = (wr[:, None] * np.full(angular, 2.0 * np.pi / angular)[None, :]).reshape(-1)
    else:
        sampler = qmc.Sobol(2 * n + 1, scramble=True, seed=seed)
        s = sampler.random(qmc_points)
        g = _normal.ppf(np.clip(s[:, : 2 * n], 1e-12, 1 - 1e-12))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = r * s[:, 2 * n] ** (1.0 / (2 * n))
        u = (g[:, :n] + 1j * g[:, n:]) * rad[:, None]
        weights = np.full(qmc_points, math.pi ** n / math.factorial(n) * r ** (2 * n) / qmc_points)
    smooth = one_minus_mobius_sq(center, u)
    radius = np.sqrt(np.maximum(1.0 - smooth, 0.0))
    dlt = delta_from_smooth(smooth, radius, convention)
    return float(np.sum(weights * mobius_jacobian(center, u) * dlt ** beta))


def weighted_ball_volume(n: int, centers, r: float, beta: float = 0.0, convention: str = "smooth"):
    """``nu_beta(B(z, r))`` for one or many centers."""
    if beta <= -1:
        raise ParameterError(f"weight exponent must exceed -1, got {beta}")
    pts = check_inside(centers, n)
    if convention == "smooth" or beta == 0:
        return smooth_weighted_ball_volume(n, pts, r, beta)
    flat = pts.reshape(-1, n)
    vals = np.array([_pullback_ball_volume(n, c, r, beta, convention) for c in flat])
    return vals.reshape(pts.shape[:-1])


def ball_volume(d: ModelDomain, b: KobayashiBall, weight_exponent: float = 0.0) -> float:
    """Weighted Lebesgue measure ``int_B delta^beta dnu`` of a Kobayashi ball."""
    if weight_exponent <= -1:
        raise ParameterError(f"weight exponent must exceed -1, got {weight_exponent}")
    if b.n != d.n:
        raise ParameterError("ball and domain dimensions differ")
    return float(weighted_ball_volume(d.n, b.center, b.r, weight_exponent, d.weight_convention))


def delta_comparability_check(d: ModelDomain, z0, r: float, samples: int, seed: int = 0):
    """Range of ``delta(z)/delta(z0)`` over uniform samples of ``B(z0, r)``."""
    if samples < 1:
        raise ParameterError("samples must be at least 1")
    ball = KobayashiBall(z0, r)
    pts = ball.sample(samples, np.random.default_rng(seed))
    ratio = np.asarray(boundary_distance(d, pts)) / boundary_distance(d, ball.center)
    return float(np.min(ratio)), float(np.max(ratio))


def radial_point(n: int, radius, direction=None) -> np.ndarray:
    """Points ``radius * e`` along a unit direction (default ``e_1``)."""
    if direction is None:
        e = np.zeros(n, dtype=complex)
        e[0] = 1.0
    else:
        e = np.asarray(direction, dtype=complex).reshape(-1)
        e = e / math.sqrt(float(norm_sq(e)))
    return np.asarray(radius, dtype=float)[..., None] * e


def radius_for_delta(delta, convention: str = "smooth"):
    """Radius ``|z|`` at which the boundary distance equals ``delta``."""
    delta = np.asarray(delta, dtype=float)
    if convention == "smooth":
        return np.sqrt(1.0 - delta)
    return 1.0 - delta


def boundary_sequence(n: int = 1, kmax: int = 10, kmin: int = 1, direction=None) -> np.ndarray:
    """Centers ``(1 - 2^-k) e`` for ``k = kmin..kmax``."""
    k = np.arange(kmin, kmax + 1, dtype=float)
    return radial_point(n, 1.0 - 2.0 ** (-k), direction)


def radial_grid(n: int, depth: float, count: int, top: float = 0.1, convention: str = "smooth",
                direction=None) -> np.ndarray:
    """Points on a ray with boundary distance log-spaced from ``top`` down to ``depth``."""
    deltas = np.geomspace(top, depth, count)
    return radial_point(n, radius_for_delta(deltas, convention), direction)


# ----------------------------------------------------------------------------
# lattices
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """Finite r-lattice of the truncated domain ``{delta >= eps}``."""

    centers: np.ndarray
    r: float
    overlap_bound: int
    boundary_cutoff: float
    domain: ModelDomain
    covering_radius: float
    candidate_count: int
    uncovered_samples: int

    def __len__(self):
        return self.centers.shape[0]

    @property
    def big_radius(self) -> float:
        return 0.5 * (1.0 + self.r)

    def deltas(self) -> np.ndarray:
        return np.asarray(boundary_distance(self.domain, self.centers))


def _sphere_points(n, count, seed):
    if n == 1:
        return None
    sampler = qmc.Sobol(2 * n, scramble=True, seed=seed)
    m = max(1, int(math.ceil(math.log2(max(count, 1)))))
    g = _normal.ppf(np.clip(sampler.random_base2(m)[:count], 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :n] + 1j * g[:, n:]


def _candidate_grid(d: ModelDomain, eps: float, mesh: float, max_candidates: int) -> np.ndarray:
    n = d.n
    rmax = float(radius_for_delta(eps, d.weight_convention))
    # the outermost ring must satisfy delta >= eps exactly in floating point
    while float(boundary_distance(d, np.full(n, rmax / math.sqrt(n)))) < eps:
        rmax = float(np.nextafter(rmax, 0.0))
    s_max = float(np.arctanh(rmax))
    step = math.sqrt(2.0) * mesh
    levels = max(1, int(math.ceil(s_max / step)))
    s_levels = np.linspace(0.0, s_max, levels + 1)
    counts = []
    for i, s in enumerate(s_levels):
        if i == 0:
            counts.append(1)
            continue
        rho = math.tanh(s)
        if n == 1:
            length = math.pi * math.sinh(2.0 * s)
            counts.append(max(3, int(math.ceil(length / step))))
        else:
            area = 2.0 * math.pi ** n / math.factorial(n - 1) * rho ** (2 * n - 1) / (1.0 - rho * rho) ** n
            counts.append(max(2 * n + 1, int(math.ceil(area / step ** (2 * n - 1)))))
    total = int(sum(counts))
    if total > max_candidates:
        raise ResourceError(
            f"lattice candidate grid needs {total} points (budget {max_candidates}); "
            "raise the boundary cutoff eps, raise r, or increase the budget"
        )
    chunks = [np.zeros((1, n), dtype=complex)]
    for i in range(1, len(s_levels)):
        rho = rmax if i == len(s_levels) - 1 else min(math.tanh(s_levels[i]), rmax)
        m = counts[i]
        if n == 1:
            theta = 2.0 * np.pi * (np.arange(m) + 0.5 * (i % 2)) / m
            chunks.append((rho * np.exp(1j * theta))[:, None])
        else:
            chunks.append(rho * _sphere_points(n, m, seed=i))
    cand = np.concatenate(chunks, axis=0)
    low = np.asarray(boundary_distance(d, cand)) < eps
    cand[low] *= 1.0 - 1e-14
    return cand


def _real_view(pts: np.ndarray) -> np.ndarray:
    return np.concatenate([pts.real, pts.imag], axis=-1)


def truncated_sample(d: ModelDomain, eps: float, count: int, seed: int = 0) -> np.ndarray:
    """Points of ``{delta >= eps}`` with boundary distance log-uniform in [eps, 1]."""
    rng = np.random.default_rng(seed)
    deltas = np.exp(rng.uniform(math.log(eps), 0.0, count))
    radii = radius_for_delta(deltas, d.weight_convention)
    if d.n == 1:
        dirs = np.exp(2j * np.pi * rng.random(count))[:, None]
    else:
        g = rng.standard_normal((count, 2 * d.n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        dirs = g[:, : d.n] + 1j * g[:, d.n:]
    return radii[:, None] * dirs


def _neighbours(tree, pts, rho, center_pts):
    """For each point, indices of tree points within pseudo-hyperbolic ``rho``."""
    out = []
    for p in pts:
        c, r_par, r_perp = euclidean_ellipsoid(p, rho)
        bound = r_perp if p.shape[0] > 1 else r_par
        idx = tree.query_ball_point(_real_view(c), bound * (1 + 1e-9) + 1e-15)
        if idx:
            idx = np.asarray(idx)
            keep = pseudo_hyperbolic(p, center_pts[idx], p.shape[0]) < rho
            out.append(idx[keep])
        else:
            out.append(np.empty(0, dtype=int))
    return out


def _prune(cand, chosen, target, n):
    """Drop centers, latest first, whose candidates stay covered without them."""
    rho = math.tanh(target)
    tree = cKDTree(_real_view(cand))
    owned = _neighbours(tree, cand[chosen], rho, cand)
    counts = np.zeros(cand.shape[0], dtype=int)
    for idx in owned:
        counts[idx] += 1
    keep = np.ones(chosen.size, dtype=bool)
    for j in range(chosen.size - 1, -1, -1):
        idx = owned[j]
        if idx.size and np.all(counts[idx] >= 2):
            counts[idx] -= 1
            keep[j] = False
    return chosen[keep]


def build_lattice(d: ModelDomain, r: float, eps: float, mesh_fraction: float = 0.25,
                  max_candidates: int = 2_000_000, check_samples: int = 10_000,
                  seed: int = 0) -> Lattice:
    """Greedy farthest-point r-lattice of ``{delta >= eps}``.

    Candidates lie on a grid whose Kobayashi mesh is ``mesh_fraction *
    artanh(r)``.  Farthest-point selection (ties to the lowest index)
    continues until every candidate lies within ``artanh(r) - mesh`` of a
    center, so selected centers are pairwise at least that far apart; a
    reverse pass then drops centers made redundant by later ones.
    Covering and the overlap count ``m`` for the balls ``B(a_k, R)`` with
    ``R = (1+r)/2`` are then measured on an independent boundary-graded
    sample.
    """
    if not 0.0 < r < 1.0:
        raise ParameterError(f"lattice radius must lie in (0, 1), got {r}")
    if not 0.0 < eps <= 0.5:
        raise ParameterError(f"boundary cutoff must lie in (0, 0.5], got {eps}")
    n = d.n
    mesh = mesh_fraction * float(np.arctanh(r))
    cand = _candidate_grid(d, eps, mesh, max_candidates)
    target = float(np.arctanh(r)) - mesh
    tree = cKDTree(_real_view(cand))
    mind = np.full(cand.shape[0], np.inf)
    chosen = []
    idx = 0
    while True:
        chosen.append(idx)
        current = mind.max()
        if np.isfinite(current):
            c, r_par, r_perp = euclidean_ellipsoid(cand[idx], math.tanh(current))
            bound = r_perp if n > 1 else r_par
            near = np.asarray(tree.query_ball_point(_real_view(c), bound * (1 + 1e-9) + 1e-15), dtype=int)
        else:
            near = np.arange(cand.shape[0])
        if near.size:
            dist = np.arctanh(np.minimum(pseudo_hyperbolic(cand[idx], cand[near], n), 1.0 - 1e-16))
            mind[near] = np.minimum(mind[near], dist)
        idx = int(np.argmax(mind))
        if mind[idx] < target:
            break
    chosen = _prune(cand, np.asarray(chosen), target, n)
    centers = cand[chosen]

    sample = truncated_sample(d, eps, check_samples, seed=seed)
    ctree = cKDTree(_real_view(centers))
    cover = _neighbours(ctree, sample, r, centers)
    uncovered = int(sum(1 for c in cover if c.size == 0))
    overlap = _neighbours(ctree, sample, 0.5 * (1.0 + r), centers)
    m = max(1, max(c.size for c in overlap))
    return Lattice(
        centers=centers,
        r=r,
        overlap_bound=int(m),
        boundary_cutoff=eps,
        domain=d,
        covering_radius=target + mesh,
        candidate_count=int(cand.shape[0]),
        uncovered_samples=uncovered,
    )


@lru_cache(maxsize=16)
def cached_lattice(n: int, convention: str, r: float, eps: float) -> Lattice:
    return build_lattice(ModelDomain(n, convention), r, eps)
