"""Kinetic Langevin UBU integrator with tensor-norm machinery and Wasserstein bound tooling."""

__version__ = "0.1.0"

from .errors import NumericalError
from .tensor3 import NormEstimate, Tensor3, gram_matrix, load_tensor, norm_12_3, norm_123_bounds, slice_spectral_norms
from .gaussian_chaos import (
    ChaosResult,
    chaos_bound,
    chaos_mean_exact,
    chaos_mean_mc,
    chaos_report,
    erroneous_bound,
    hessian_term_bound,
    v4_moment,
    v4_moment_mc,
)
from .models import (
    PotentialModel,
    QuadraticSpec,
    RegressionData,
    hessian_tensor,
    load_regression_csv,
    make_gaussian,
    make_logistic,
    make_product,
)
from .metrics import (
    K0_FACTOR,
    coupling_distance,
    norm_equivalence_constants,
    p_matrix,
    p_norm_sq,
    w2_empirical_1d,
    w2_gaussian,
    w2_gaussian_weighted,
)
from .ubu import (
    ChainState,
    NoiseTriple,
    UBUParams,
    ef_coeffs,
    exact_gaussian_propagator,
    fold_noise,
    noise_chol,
    noise_cov,
    refine_noise,
    run_coupled,
    run_trajectory,
    sample_noise,
    stationary_sample,
    ubu_step,
    zero_noise,
)
from .bounds import (
    BoundConstants,
    K0,
    K1,
    K2,
    bias_term,
    bound_report,
    local_error_budget,
    r_h,
    steps_to_eps,
    local_error_constants,
    wasserstein_bound,
)
from .experiments import (
    ExperimentResult,
    ResultRecord,
    bias_scan_d,
    bias_scan_h,
    bound_compare,
    contraction_run,
    fit_loglog_slope,
    local_order_scan,
    strong_order_scan,
    write_result,
)

__all__ = [name for name in dir() if not name.startswith("_")]
