"""Reduction of repumped multilevel clock atoms to effective two-level lasers.

Subpackages and modules:

- ``levels``: dense operators, Liouvillians, steady states for few-level atoms
- ``reduction``: non-Hermitian-eigenvalue reduction to pump/shift/dephasing
- ``sr88``: the 88Sr six-level pump scheme and laser model builders
- ``cumulant``: symbolic second-order moment equations and their compiler
- ``laser``: moment-system steady states, two-time correlations, spectra
- ``scan``: parameter scans and contour extraction
- ``cli``: command-line entry points
"""

from .levels import (
    JumpProcess,
    LevelScheme,
    build_hamiltonian,
    build_liouvillian,
    evolve_dm,
    expect,
    jump,
    liouvillian_for,
    sigma,
    steady_state_dm,
)
from .reduction import (
    EffectiveTwoLevelParams,
    EigenPair,
    ThreeLevelConfig,
    analytic_three_level,
    effective_nonhermitian,
    match_clock_eigenvalues,
    reduce_scheme,
)
from .sr88 import (
    LaserConfig,
    LaserModel,
    SixLevelConfig,
    dephasing_estimate,
    six_level_laser_model,
    six_level_scheme,
    three_level_scheme,
    two_level_laser_model,
    two_level_scheme,
)
from .cumulant import (
    MomentSystem,
    build_moment_system,
    build_regression_system,
    compile_system,
)
from .laser import (
    CorrelationResult,
    MomentState,
    SpectrumResult,
    SteadyStateConvergenceError,
    correlation,
    correlation_window,
    laser_spectrum,
    laser_steady_state,
    spectrum_from_correlation,
)

__version__ = "0.1.0"
