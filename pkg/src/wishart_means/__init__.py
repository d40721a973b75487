"""Averaging complex Wishart covariance estimates on the HPD manifold.

Compares the Frechet (Karcher) mean and the arithmetic mean of independent
complex Wishart covariance estimates through intrinsic bias and Riemannian
risk, with exact closed forms and seeded Monte Carlo estimators of the same
quantities.
"""

from .errors import (
    DomainError,
    EigenSolverError,
    InsufficientDofError,
    NotPositiveDefiniteError,
    SingularTransformError,
    UnsupportedDimensionError,
)
from .frechet import (
    KarcherOptions,
    KarcherResult,
    arithmetic_mean,
    frechet_mean,
    frechet_objective,
    karcher_gradient,
)
from .hpd import (
    EigenDecomposition,
    HermitianMatrix,
    HpdMatrix,
    congruence,
    hermitian_eigen,
    matrix_exp,
    matrix_inv_sqrt,
    matrix_log,
    matrix_sqrt,
    random_hpd,
    symmetrize,
)
from .intrinsic import (
    EstimatorKind,
    MonteCarloReport,
    bias_coefficient,
    digamma,
    intrinsic_bias_arithmetic,
    intrinsic_bias_frechet,
    monte_carlo_bias_risk,
    risk_decomposition,
    scalar_risk_arithmetic,
    scalar_risk_frechet,
    trigamma,
)
from .manifold import (
    TangentVector,
    exp_map,
    geodesic_distance,
    inner_product,
    log_map,
    tangent_norm,
)
from .wishart import (
    SeedSpec,
    WishartModel,
    sample_batch,
    sample_complex_gaussian,
    sample_covariance,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EigenSolverError",
    "InsufficientDofError",
    "NotPositiveDefiniteError",
    "SingularTransformError",
    "UnsupportedDimensionError",
    "KarcherOptions",
    "KarcherResult",
    "arithmetic_mean",
    "frechet_mean",
    "frechet_objective",
    "karcher_gradient",
    "EigenDecomposition",
    "HermitianMatrix",
    "HpdMatrix",
    "congruence",
    "hermitian_eigen",
    "matrix_exp",
    "matrix_inv_sqrt",
    "matrix_log",
    "matrix_sqrt",
    "random_hpd",
    "symmetrize",
    "EstimatorKind",
    "MonteCarloReport",
    "bias_coefficient",
    "digamma",
    "intrinsic_bias_arithmetic",
    "intrinsic_bias_frechet",
    "monte_carlo_bias_risk",
    "risk_decomposition",
    "scalar_risk_arithmetic",
    "scalar_risk_frechet",
    "trigamma",
    "TangentVector",
    "exp_map",
    "geodesic_distance",
    "inner_product",
    "log_map",
    "tangent_norm",
    "SeedSpec",
    "WishartModel",
    "sample_batch",
    "sample_complex_gaussian",
    "sample_covariance",
    "__version__",
]
