"""Numerical workbench for shifted convolution sums of modular-form
coefficient sequences: exact and normalized coefficient tables,
shift-averaged correlation sums, exponential-sum grids with Farey arc
dissections, short-interval variances, and empirical exponent checks
against the predicted envelopes.
"""

__version__ = "0.1.0"

from .coefficients import (                                    # noqa: F401
    CoefficientTable,
    ExactTauTable,
    FClassStats,
    compute_tau,
    deligne_check,
    load_user_coefficients,
    normalize_gl2,
    save_coefficients,
    sym2_from_tau,
    sym2_lift,
    verify_hecke,
)
from .errors import ShiftsumError                              # noqa: F401
from .sums import (                                            # noqa: F401
    PartialSumTable,
    ShiftedSumResult,
    ShiftedSumSpec,
    averaged_shifted_sum,
    fclass_stats,
    partial_sums,
    reordered_average,
    shifted_sum,
)
from .expsum import (                                          # noqa: F401
    ExpSumGrid,
    exp_sum,
    exp_sum_grid,
    geometric_kernel,
    kernel_level_mass,
    kernel_mass_at,
    uniform_bound_scan,
)
from .arcs import (                                            # noqa: F401
    Arc,
    FareyDissection,
    arc_decomposed_average,
    dirichlet_dissection,
    gallagher_compare,
    short_interval_variance,
)
from .experiments import (                                     # noqa: F401
    BoundCheckConfig,
    ExponentFit,
    check_corollary_gl3,
    check_theorem_main,
    check_weighted,
    fclass_membership,
    fit_exponent,
    q_star,
)
