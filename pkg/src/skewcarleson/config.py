"""Experiment configuration: one YAML or JSON key-value tree per experiment.

Schema (all sections optional, defaults shown)::

    domain:     {n: 1, weight_convention: smooth, eps: 1.0e-3}
    measure:    {kind: radial_density, exponent: 0.0, scale: 1.0}
                # kind: atomic          points: [[re, im], ...], weights: [...]
                # kind: boundary_atoms  s: 2.0, kmax: 12
                # kind: lattice_weighted  s: 2.0, r: 0.5, eps: 1.0e-2
    operator:   {p1: 2, alpha1: 0, p2: 2, alpha2: 0, beta: 0}
    carleson:   {lam: <from operator>, gamma: <from operator>, r: 0.5}
    grid:       {depth: 1.0e-3, per_decade: 20, count: null}
                # sup-branch sweeps run from delta = 1 down to depth; count overrides per_decade
    quadrature: {kind: tensor_polar, radial: 64, angular: 256, grading: 2.0, points: 8192}
    berezin:    {level: null}
    thresholds: {slope_tol: 0.1, ratio_cap: 100.0}
    seed: 0

Points of ``C^n`` are written as lists of ``[re, im]`` pairs; on the disk
a single pair per point is accepted.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, ResourceError, SkewCarlesonError
from .geometry import CONVENTIONS, ModelDomain, cached_lattice
from .measures import CarlesonParams, Measure
from .quadrature import QuadratureRule, ball_rule, disk_rule
from .toeplitz import OperatorParams

THREADS_ENV = "SKEWCARLESON_THREADS"
MEASURE_KINDS = ("radial_density", "atomic", "boundary_atoms", "lattice_weighted")
RULE_KINDS = ("tensor_polar", "qmc")


def worker_count() -> int:
    """Thread count from the environment override, defaulting to 1."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(THREADS_ENV, f"expected an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(THREADS_ENV, "must be at least 1")
    return value


@dataclass
class DomainSpec:
    n: int = 1
    weight_convention: str = "smooth"
    eps: float = 1e-3


@dataclass
class MeasureSpec:
    kind: str = "radial_density"
    exponent: float = 0.0
    scale: float = 1.0
    points: list | None = None
    weights: list | None = None
    s: float = 2.0
    kmax: int = 12
    r: float = 0.5
    eps: float = 1e-2


@dataclass
class OperatorSpec:
    p1: float = 2.0
    alpha1: float = 0.0
    p2: float = 2.0
    alpha2: float = 0.0
    beta: float = 0.0


@dataclass
class CarlesonSpec:
    lam: float | None = None
    gamma: float | None = None
    r: float = 0.5


@dataclass
class GridSpec:
    depth: float = 1e-3
    per_decade: int = 20
    count: int | None = None


@dataclass
class QuadratureSpec:
    kind: str = "tensor_polar"
    radial: int = 64
    angular: int = 256
    grading: float = 2.0
    points: int = 8192


@dataclass
class BerezinSpec:
    level: float | None = None


@dataclass
class Thresholds:
    slope_tol: float = 0.1
    ratio_cap: float = 100.0


@dataclass
class ExperimentConfig:
    domain: DomainSpec = field(default_factory=DomainSpec)
    measure: MeasureSpec = field(default_factory=MeasureSpec)
    operator: OperatorSpec | None = None
    carleson: CarlesonSpec = field(default_factory=CarlesonSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    berezin: BerezinSpec = field(default_factory=BerezinSpec)
    thresholds: Thresholds = field(default_factory=Thresholds)
    seed: int = 0

    # builders ------------------------------------------------------------
    def model_domain(self) -> ModelDomain:
        return ModelDomain(self.domain.n, self.domain.weight_convention)

    def operator_params(self) -> OperatorParams:
        o = self.operator or OperatorSpec()
        return _wrap("operator", lambda: OperatorParams(o.p1, o.alpha1, o.p2, o.alpha2, o.beta, self.domain.n))

    def carleson_params(self) -> CarlesonParams:
        c = self.carleson
        lam, gamma = c.lam, c.gamma
        if lam is None:
            if self.operator is None:
                lam, gamma = 1.0, 0.0 if gamma is None else gamma
            else:
                op = self.operator_params()
                lam, gamma = op.lam, op.gamma
        elif gamma is None and lam != 0:
            gamma = 0.0
        return _wrap("carleson", lambda: CarlesonParams(lam, gamma, c.r, self.domain.n))

    def build_measure(self) -> Measure:
        m, n = self.measure, self.domain.n
        if m.kind == "radial_density":
            return _wrap("measure", lambda: Measure.radial(m.exponent, m.scale, n))
        if m.kind == "boundary_atoms":
            return _wrap("measure", lambda: Measure.boundary_atoms(m.s, n, m.kmax))
        if m.kind == "lattice_weighted":
            lat = _wrap("measure", lambda: cached_lattice(n, "smooth", m.r, m.eps))
            return Measure.lattice_power(lat, m.s)
        pts = _parse_points(m.points, n, "measure.points")
        if m.weights is None or len(m.weights) != pts.shape[0]:
            raise ConfigError("measure.weights", "needs one weight per point")
        return _wrap("measure", lambda: Measure.atomic(pts, np.asarray(m.weights, dtype=float), n))

    def rule(self) -> QuadratureRule:
        q = self.quadrature
        if q.kind == "tensor_polar":
            if self.domain.n != 1:
                raise ConfigError("quadrature.kind", "tensor_polar rules exist only for n = 1")
            return _wrap("quadrature", lambda: disk_rule(q.radial, q.angular, q.grading))
        return _wrap("quadrature", lambda: ball_rule(self.domain.n, q.points, 8, self.seed))

    def to_dict(self) -> dict:
        return asdict(self)


def _wrap(path, build):
    try:
        return build()
    except (ConfigError, ResourceError):
        raise
    except SkewCarlesonError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_points(raw, n, path) -> np.ndarray:
    if raw is None:
        raise ConfigError(path, "required for atomic measures")
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, f"points must be numeric [re, im] pairs: {exc}") from exc
    if n == 1 and arr.ndim == 2 and arr.shape[-1] == 2:
        arr = arr[:, None, :]
    if arr.ndim != 3 or arr.shape[1:] != (n, 2):
        raise ConfigError(path, f"expected shape (count, {n}, 2) of [re, im] pairs, got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


_SECTIONS = {
    "domain": DomainSpec,
    "measure": MeasureSpec,
    "operator": OperatorSpec,
    "carleson": CarlesonSpec,
    "grid": GridSpec,
    "quadrature": QuadratureSpec,
    "berezin": BerezinSpec,
    "thresholds": Thresholds,
}

_FLOAT_FIELDS = {"eps", "exponent", "scale", "s", "r", "p1", "alpha1", "p2", "alpha2", "beta",
                 "lam", "gamma", "depth", "grading", "level", "slope_tol", "ratio_cap"}
_INT_FIELDS = {"n", "kmax", "per_decade", "count", "radial", "angular", "points"}


def _coerce(section, key, value):
    path = f"{section}.{key}"
    if value is None:
        return None
    if key in _INT_FIELDS and not (section == "measure" and key == "points"):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return int(value)
    if key in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    return value


def parse_config(tree: dict) -> ExperimentConfig:
    """Validate a parsed key-value tree; errors carry the dotted field path."""
    if tree is None:
        tree = {}
    if not isinstance(tree, dict):
        raise ConfigError("<root>", "configuration must be a mapping")
    unknown = set(tree) - set(_SECTIONS) - {"seed"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        raw = tree.get(name)
        if raw is None:
            continue
        if not isinstance(raw, dict):
            raise ConfigError(name, "section must be a mapping")
        allowed = set(cls.__dataclass_fields__)
        for key in raw:
            if key not in allowed:
                raise ConfigError(f"{name}.{key}", "unknown field")
        kwargs[name] = cls(**{k: _coerce(name, k, v) for k, v in raw.items()})
    seed = tree.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"expected a nonnegative integer, got {seed!r}")
    cfg = ExperimentConfig(**kwargs, seed=seed)
    _validate(cfg)
    return cfg


def _check(cond, path, msg):
    if not cond:
        raise ConfigError(path, msg)


def _validate(cfg: ExperimentConfig):
    d = cfg.domain
    _check(d.n >= 1, "domain.n", "must be a positive integer")
    _check(d.weight_convention in CONVENTIONS, "domain.weight_convention", f"must be one of {CONVENTIONS}")
    _check(0 < d.eps < 0.5, "domain.eps", "must lie in (0, 0.5)")
    m = cfg.measure
    _check(m.kind in MEASURE_KINDS, "measure.kind", f"must be one of {MEASURE_KINDS}")
    if m.kind == "radial_density":
        _check(m.exponent > -1, "measure.exponent", "must exceed -1")
        _check(m.scale > 0, "measure.scale", "must be positive")
    if m.kind == "lattice_weighted":
        _check(0 < m.r < 1, "measure.r", "must lie in (0, 1)")
        _check(0 < m.eps <= 0.5, "measure.eps", "must lie in (0, 0.5]")
    if m.kind == "boundary_atoms":
        _check(1 <= m.kmax <= 40, "measure.kmax", "must lie in [1, 40]")
    _check(0 < cfg.carleson.r < 1, "carleson.r", "must lie in (0, 1)")
    g = cfg.grid
    _check(0 < g.depth < 1, "grid.depth", "must lie in (0, 1)")
    _check(g.per_decade >= 2, "grid.per_decade", "must be at least 2")
    if g.count is not None:
        _check(g.count >= 2, "grid.count", "must be at least 2")
    q = cfg.quadrature
    _check(q.kind in RULE_KINDS, "quadrature.kind", f"must be one of {RULE_KINDS}")
    _check(q.radial >= 2 and q.angular >= 2, "quadrature", "node counts must be at least 2")
    _check(q.grading >= 1, "quadrature.grading", "must be at least 1")
    t = cfg.thresholds
    _check(t.slope_tol > 0, "thresholds.slope_tol", "must be positive")
    _check(t.ratio_cap > 1, "thresholds.ratio_cap", "must exceed 1")
    if cfg.berezin.level is not None:
        _check(cfg.berezin.level > 0, "berezin.level", "must be positive")
    if cfg.operator is not None:
        cfg.operator_params()
    c = cfg.carleson
    if c.lam == 0 and c.gamma not in (None, 0.0):
        raise ConfigError("carleson.gamma", "the lam = 0 class does not depend on gamma; leave it unset")
    cfg.carleson_params()
    if m.kind != "lattice_weighted":
        # lattices are built lazily; everything else is cheap to check now
        cfg.build_measure()


def load_config(path) -> ExperimentConfig:
    """Read a ``.json`` or YAML file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from exc
    try:
        tree = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError("<file>", f"cannot parse {path}: {exc}") from exc
    return parse_config(tree)
