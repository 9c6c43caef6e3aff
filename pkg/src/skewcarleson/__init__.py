"""Skew Carleson measures and Toeplitz operators between weighted Bergman spaces on the unit ball."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundaryGrowthWarning,
    BranchError,
    ConfigError,
    DivergenceError,
    DomainError,
    EvaluationError,
    HypothesisWarning,
    ParameterError,
    ResourceError,
    SkewCarlesonError,
)
from .geometry import (  # noqa: E402
    DISK,
    KobayashiBall,
    Lattice,
    ModelDomain,
    ball_volume,
    boundary_distance,
    build_lattice,
    kobayashi_distance,
    mobius,
    pseudo_hyperbolic,
)
from .quadrature import QuadratureRule, ball_rule, default_rule, disk_rule, integrate, monte_carlo_oracle  # noqa: E402
from .kernels import (  # noqa: E402
    KernelParams,
    KernelSum,
    Polynomial,
    SpaceParams,
    bergman_kernel,
    bergman_project,
    duality_pairing,
    kernel_integral_estimate,
    norm,
    normalized_kernel,
)
from .measures import (  # noqa: E402
    CarlesonParams,
    Measure,
    berezin_diagnostic,
    berezin_transform,
    classify_skew_carleson,
    lattice_diagnostic,
    mu_hat,
    product_carleson_test,
    skew_carleson_norm,
)
from .toeplitz import (  # noqa: E402
    OperatorParams,
    TestFunctionFamily,
    apply_toeplitz,
    compactness_probe,
    derive_params,
    estimate_operator_norm,
    lower_bound_probe,
)

__all__ = [
    "__version__",
    "BoundaryGrowthWarning",
    "BranchError",
    "ConfigError",
    "DivergenceError",
    "DomainError",
    "EvaluationError",
    "HypothesisWarning",
    "ParameterError",
    "ResourceError",
    "SkewCarlesonError",
    "DISK",
    "KobayashiBall",
    "Lattice",
    "ModelDomain",
    "ball_volume",
    "boundary_distance",
    "build_lattice",
    "kobayashi_distance",
    "mobius",
    "pseudo_hyperbolic",
    "KernelParams",
    "KernelSum",
    "Polynomial",
    "SpaceParams",
    "bergman_kernel",
    "bergman_project",
    "duality_pairing",
    "kernel_integral_estimate",
    "norm",
    "normalized_kernel",
    "CarlesonParams",
    "Measure",
    "berezin_diagnostic",
    "berezin_transform",
    "classify_skew_carleson",
    "lattice_diagnostic",
    "mu_hat",
    "product_carleson_test",
    "skew_carleson_norm",
    "OperatorParams",
    "TestFunctionFamily",
    "apply_toeplitz",
    "compactness_probe",
    "derive_params",
    "estimate_operator_norm",
    "lower_bound_probe",
    "QuadratureRule",
    "ball_rule",
    "default_rule",
    "disk_rule",
    "integrate",
    "monte_carlo_oracle",
]
