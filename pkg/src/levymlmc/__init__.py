"""Coupled two-level Euler schemes for SDEs driven by pure-jump Levy
processes: sharp-rate normalization of the level-to-level error, samplers
for the corresponding limit laws, and the statistical machinery to confirm
the convergence at desk scale."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .coeffs import Coefficient, constant, custom, linear, smooth_bump
from .euler import (
    CoupledEulerResult,
    compute_z_diag,
    decomposition_residual,
    euler_coarse_interp,
    euler_fine,
    gronwall_bound,
    multilevel_error,
)
from .limits import (
    JumpMarks,
    LimitSample,
    StableSpec,
    c1_limit_coefficient,
    sample_limit,
    sample_stable_v,
    sample_standard_stable,
    sample_z_case1,
    sample_z_case3,
    sample_z_case_stable,
    solve_limit_u,
    stable_spec_for_case,
    v_cf_exponent,
    x_reference,
)
from .measure import (
    CGMY,
    CustomModel,
    LevyModel,
    TailStats,
    TwoSidedStable,
    fubini_check,
    levy_cf_exponent,
    tail_stats,
    tail_theta,
    truncated_jump_sampler,
    xlog_integral,
)
from .paths import FineGridPath, assemble_cells, coarse_increments, sample_path
from .scheme import (
    CaseParams,
    GridSpec,
    RegimeError,
    classify_case,
    make_case_params,
    rate_and_cutoff,
)
from .stats import (
    RateFit,
    SampleSummary,
    SummaryAccumulator,
    empirical_cf,
    ks_critical,
    ks_distance,
    poisson_count_test,
    rate_fit,
)

__version__ = "0.1.0"
