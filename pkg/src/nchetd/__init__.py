"""Exponential time differencing solvers for the nonlocal Cahn-Hilliard
equation with Fourier spectral collocation on periodic boxes."""

from .errors import (
    BadMagic,
    BlowupError,
    ConfigError,
    DomainError,
    FileFormatError,
    GammaZeroError,
    InsufficientDataError,
    MeanError,
    MissingHistoryError,
    NchetdError,
    NonpositiveEnergyError,
    SymmetryError,
    TruncatedPayload,
    VersionMismatch,
)
from .etd import (
    PhiTable,
    StepperPlan,
    build_phi_table,
    build_plan,
    etd1_step,
    etd2_initialize,
    etd2_step,
    phi0,
    phi1,
    phi_m1,
    step_field,
)
from .experiments import (
    ConvergenceRow,
    DiagnosticsRecord,
    PowerLawFit,
    RunLog,
    convergence_study,
    fit_power_law,
    initial_condition,
    integrate_final,
    richardson_error,
    run_simulation,
)
from .kernels import (
    KernelSpec,
    NonlocalOperator,
    build_nonlocal_operator,
    conv_one,
    discrete_convolution,
    nonlocal_symbol,
    periodize_kernel,
)
from .model import (
    ModelParams,
    Problem,
    build_problem,
    double_well_derivative,
    free_energy,
    stabilized_nonlinearity,
    total_mass,
)
from .spectral import (
    Field,
    Grid,
    SpectralField,
    Symbol,
    apply_symbol,
    laplacian_symbol,
    mean,
    norm_hm1,
    norm_l2,
    norm_linf,
    to_physical,
    to_spectral,
)

__version__ = "0.1.0"
