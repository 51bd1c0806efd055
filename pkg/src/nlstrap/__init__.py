"""Standing waves of the 2D trapped NLS with combined power nonlinearities.

Library layout:

* quadrature  - radial/Cartesian grids, corrected quadrature, dilation,
  rearrangement
* functionals - the (T, L, Q, A, B) quintuple, action/energy, residuals
* rayleigh    - the generalized Rayleigh quotients of the prescribed-action
  formulation
* solver      - variational solvers and the fixed-frequency oracle
* atlas       - the extremal-coefficient curve, its inverse, and frequency
  branches
* propagator  - split-step time integration and the orbital-stability
  experiment
* cli         - the `nlstrap` command-line front end
"""

from .errors import (
    BlowUpError,
    BranchError,
    ConfigurationError,
    InfeasibleDilationError,
    ZeroFieldError,
)
from .functionals import (
    GROUND_EIGENVALUE,
    FunctionalValues,
    Parameters,
    action,
    el_residual,
    energy,
    evaluate_functionals,
    pohozaev_defect,
    pohozaev_rel,
    residual_rel,
    sigma_norm_sq,
)
from .quadrature import (
    CartesianGrid,
    ComplexField2D,
    RadialField,
    RadialGrid,
    decreasing_rearrangement,
    dilate,
    gaussian_profile,
    integrate_radial,
    make_cartesian_grid,
    make_radial_grid,
    radial_gradient_sq,
    radial_to_cartesian,
)
from .rayleigh import (
    coefficient_objective,
    coefficient_quotient,
    frequency_quotient,
    optimal_dilation,
    reduced_frequency_quotient,
    stationary_amplitude,
)
from .solver import (
    SolveReport,
    SolverConfig,
    VerificationRecord,
    default_radial_grid,
    renormalize,
    solve_constrained_appendix,
    solve_ffs,
    solve_fixed_frequency,
    solve_mu_hat,
    verify_solution,
)
from .atlas import (
    Branch,
    BranchPoint,
    SandwichReport,
    check_sandwich,
    extremal_curve,
    lambda_star,
    mu_hat_zero,
    s_of_mu,
    sweep_branch,
)
from .propagator import (
    PropagatorConfig,
    StabilityTrace,
    evaluate_functionals_2d,
    orbital_distance,
    perturbation_field,
    propagate,
    sigma_norm_sq_2d,
    stability_experiment,
    strang_step,
)

__version__ = "0.1.0"
