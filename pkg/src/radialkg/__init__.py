"""Solver and experiment harness for the damped radial nonlinear Klein-Gordon equation.

An implicit Strauss-Vazquez-type finite-difference scheme on the transformed
field v = r*w, with per-step Newton solves through Crout tridiagonal
reduction, a von Neumann stability advisory, discrete energy diagnostics,
and a CLI that regenerates the package's reference tables and figure data.
"""

from .diagnostics import (
    EnergySeries,
    amplitude,
    amplitude_bound_report,
    discrete_energy,
    discrete_energy_rate,
    dissipation_series,
    energy_series,
    l2_dx_norm,
    recover_w,
    relative_difference,
)
from .errors import CatalogError, NewtonDivergenceError, SingularSystemError
from .model import (
    DEFAULT_GRID,
    PRESET_A,
    PRESET_B,
    PRESET_C,
    SIN5,
    SINH5,
    ZERO,
    General,
    GridSpec,
    InitialData,
    NewtonConfig,
    Nonlinearity,
    PhysicsParams,
    Power,
    RadialField,
    bump_h,
    bump_h_prime,
    sample_initial_levels,
)
from .stability import (
    StabilityReport,
    SymbolPair,
    amplification_eigenvalues,
    necessary_condition,
    spectral_radius_scan,
    symbols,
)
from .stepper import (
    StepStats,
    Trajectory,
    first_step,
    jacobian,
    newton_solve_step,
    residual,
    run,
    sv_quotient,
)
from .tridiag import TridiagonalSystem, crout_solve

__version__ = "0.1.0"
