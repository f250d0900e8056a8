"""Velocity-space simulator and verification harness for the Coulomb
collision equation: free-space convolution coefficients, a conservative
divergence-form integrator, and numerical checks of the level-set,
barrier, and functional-inequality machinery behind its regularity theory.
"""

from .coefficients import (
    CoefficientSet,
    KernelTable,
    build_kernel_table,
    compute_coefficients,
    convolve_free_space,
    direct_convolve,
    kernel_table_for,
    verify_coefficient_bounds,
)
from .degiorgi import (
    IterationLadder,
    OdeMonitor,
    RecurrenceFit,
    beta1_exponent,
    critical_eps0,
    fit_recurrence,
    measure_ladder,
    predict_linf_bound,
    prop51_window,
    propagation_ode_monitor,
)
from .diagnostics import (
    DiagnosticsRecord,
    LevelSetWindow,
    bulk_quantities,
    eps_regularity,
    equilibrium_distance,
    level_set_energy,
    maxwellian,
    moment_growth_check,
    record,
    smoothing_rate_fit,
)
from .errors import (
    ConfigError,
    HypothesisError,
    LandauError,
    NumericError,
    StiffnessError,
    exit_code_for,
)
from .grid_field import (
    ScalarField,
    SymMatrixField,
    VectorField,
    VelocityGrid,
    gradient,
    integrate,
    laplacian,
    level_set_split,
    make_grid,
    weight_field,
    weighted_lp_norm,
)
from .inequalities import (
    CRITICAL,
    SUBCRITICAL,
    BarrierParams,
    CutoffProfile,
    InequalityReport,
    barrier_sufficient_rate,
    build_cutoff,
    check_eps_poincare,
    check_interpolation,
    check_weighted_sobolev,
    lower_bound_ratio,
    make_barrier,
    make_corpus,
    make_poincare_corpus,
    minimum_principle_monitor,
    subcritical_barrier_residual,
)
from .solver import (
    SimulationState,
    Snapshot,
    StepControl,
    Trajectory,
    divergence,
    flux,
    make_state,
    run,
    stable_dt,
    step,
)

__version__ = "0.1.0"
