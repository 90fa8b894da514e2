"""Kernel interpolation with Sobolev, Green and periodic kernels, and
empirical convergence-rate (superconvergence) experiments."""

from .green import (
    GreenKernelW22,
    apply_T,
    build_w22_kernel,
    composite_gauss_legendre,
    green_residual,
    reproducing_check,
    verify_green,
)
from .interpolation import (
    Interpolant,
    KernelExpansion,
    SolveOptions,
    UnsolvableSystemError,
    equispaced_interior,
    eval_interpolant,
    fill_distance,
    fit_interpolant,
    native_error_sq,
    native_norm_sq,
)
from .kernels import (
    KernelSpec,
    bernoulli_poly,
    check_spd,
    eval_kernel,
    gram,
    kernel_from_id,
    kernel_matrix,
)
from .metrics import ErrorRecord, RateEstimate, discrete_lp_error, fit_rate, w1_seminorm_error
from .targets import (
    bc_residual,
    bc_target,
    expansion_target,
    power_target,
    random_periodic_target,
)

__version__ = "0.1.0"
