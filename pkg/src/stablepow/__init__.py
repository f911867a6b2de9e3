"""Positive stable laws on (0, 1): densities, powers, frontier curves, certificates.

The package evaluates the density/CDF of the positive alpha-stable law Z
(Laplace transform exp(-lambda^alpha)), classifies the shape of powers Z^r,
computes the frontier curves R, R_tilde, R_hat that separate the monotone /
unimodal / non-unimodal regimes, runs exact-arithmetic complete-monotonicity
certificates, and samples Z and related laws with reproducible counter-based
streams.  Heavy kernels are numba-compiled when available; set
STABLEPOW_NO_NUMBA=1 to force the pure-numpy fallback.
"""

from .backend import backend_name
from .cmlab import (
    CmReport,
    ExpPolySum,
    LogConvexity,
    cm_check,
    log_convexity_threshold,
    make_G,
    polynomial_nonnegative,
    primitive_form,
    q_polynomial,
    tilted_density_check,
)
from .density import (
    ModeProfile,
    boundary_class,
    boundary_limits,
    g_function,
    h_function,
    laplace_transform,
    mellin,
    power_density,
    series_cut,
    stable_cdf,
    stable_density,
    stable_density_prime,
)
from .errors import AccuracyError, CriterionError, StablePowError
from .frontier import (
    FrontierPoint,
    classify_point,
    compute_R,
    compute_R_hat,
    compute_R_tilde,
    count_power_maxima,
    criterion,
    frontier_bounds,
    sweep,
)
from .kanter import (
    CertificateReport,
    KanterEval,
    a_alpha,
    b_alpha,
    certify_inequalities,
    eulerian_diff,
)
from .mc import (
    IdentityReport,
    SampleBatch,
    calibrate_exponent,
    density_sampler_gof,
    ks_threshold,
    quantile_Z,
    sample_M,
    sample_X,
    sample_Z,
    verify_identity,
)
from .specfun import EvalResult, mittag_leffler, mittag_leffler_prime, u_alpha, v_alpha

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CertificateReport",
    "CmReport",
    "CriterionError",
    "EvalResult",
    "ExpPolySum",
    "FrontierPoint",
    "IdentityReport",
    "KanterEval",
    "LogConvexity",
    "ModeProfile",
    "SampleBatch",
    "StablePowError",
    "__version__",
    "a_alpha",
    "b_alpha",
    "backend_name",
    "boundary_class",
    "boundary_limits",
    "calibrate_exponent",
    "certify_inequalities",
    "classify_point",
    "cm_check",
    "compute_R",
    "compute_R_hat",
    "compute_R_tilde",
    "count_power_maxima",
    "criterion",
    "density_sampler_gof",
    "eulerian_diff",
    "frontier_bounds",
    "g_function",
    "h_function",
    "ks_threshold",
    "laplace_transform",
    "log_convexity_threshold",
    "make_G",
    "mellin",
    "mittag_leffler",
    "mittag_leffler_prime",
    "polynomial_nonnegative",
    "power_density",
    "primitive_form",
    "q_polynomial",
    "quantile_Z",
    "sample_M",
    "sample_X",
    "sample_Z",
    "series_cut",
    "stable_cdf",
    "stable_density",
    "stable_density_prime",
    "sweep",
    "tilted_density_check",
    "u_alpha",
    "v_alpha",
    "verify_identity",
]
