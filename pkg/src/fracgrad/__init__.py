"""Numerical toolkit for the fractional derivative/gradient couple.

Spectral and direct-quadrature implementations of the fractional
Laplacian, fractional gradient, Riesz transforms and potentials on
periodic grids, a sharp-constant engine built on an internal Gamma
implementation, closed-form extremal families, and a verification
harness that reproduces the sharp weighted-norm, exponential-threshold
and sup-norm inequalities at desk scale.
"""

from .backend import BACKEND_NAME
from .constants import (
    FracParams,
    KernelConstants,
    classify_regime,
    gamma,
    herbst_constant,
    integer_order_constants,
    kernel_constants,
    morrey_constant,
    riesz_normalizer,
    sphere_area,
    twin_constants,
)
from .errors import (
    DomainError,
    GridMismatchError,
    RegimeError,
    ResourceError,
    UndefinedQuotientError,
)
from .extremal import (
    GradientCutoffFamily,
    LogCutoff,
    PowerCutoff,
    extremal_ratio,
    gradient_cutoff_family,
    h_argmax,
    h_profile,
    h_sup,
    log_cutoff_eval,
    log_cutoff_grad_norm,
    moser_blowup_lower_bound,
    power_cutoff_lp_norm,
    power_cutoff_potential_center,
)
from .field import (
    BallDomain,
    GridSpec,
    ScalarField,
    VectorField,
    gagliardo_seminorm,
    hardy_quotient,
    load_field,
    load_field_csv,
    lp_norm,
    morrey_norm,
    moser_functional,
    sample,
    save_field,
    save_field_csv,
    sup_norm,
)
from .fracops import (
    AtomicMeasure,
    MultiplierSymbol,
    apply_multiplier,
    frac_divergence,
    frac_gradient,
    frac_gradient_direct,
    frac_laplacian,
    frac_laplacian_direct,
    frac_laplacian_direct_tail_bound,
    liouville_onesided,
    measure_strength,
    potential_of_measure,
    riesz_potential,
    riesz_potential_direct,
    riesz_transform,
)
from .harness import (
    Check,
    ExperimentReport,
    adams_experiment,
    hardy_experiment,
    identity_suite,
    measure_experiment,
    morrey_sobolev_experiment,
    moser_experiment,
    run_experiment,
)

__version__ = "0.1.0"
