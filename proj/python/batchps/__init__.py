"""Batch sojourn-time distribution in the M^[X]/M/1 processor-sharing queue.

Thin python layer over the C++ core: the analytic transform pipeline
(spectral data, moment kernels, boundary coefficients, conditional
transforms, Laplace inversion) and the three oracles (differential system,
absorbing jump chain, discrete-event simulation).
"""

from _batchps import (  # noqa: F401
    BatchDistribution,
    BoundaryCoefficients,
    Bracket,
    ComputeError,
    InvalidInput,
    ModelParams,
    OdeSolution,
    SimulationOptions,
    SimulationResult,
    SpectralData,
    StationaryOccupancy,
    SurvivalPoint,
    TransformBuilder,
    TransformFamily,
    TransformOptions,
    TransientResult,
    batch_pmf,
    char_poly,
    conditional_survival,
    ctmc_oracle,
    gs_invert,
    hypergeometric_check,
    invert,
    kernel,
    kernel_param,
    moment,
    moment_integral,
    ode_oracle,
    rhs_integral,
    simulate,
    simulate_transient,
    solve_boundary,
    spectral_data,
    stationary_occupancy,
    unconditional_moment1,
    unconditional_survival,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
