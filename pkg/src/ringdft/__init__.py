"""Ring-polymer self-consistent field theory and Kohn-Sham dynamics on 1D grids."""

from .beta_propagator import (
    Constants,
    PropagatorMatrix,
    density_from_propagator,
    initialize,
    march_beta,
    partition_function,
)
from .errors import (
    ConfigurationError,
    DivergenceError,
    GridMismatchError,
    InsufficientSpectrumError,
    NumericalError,
    RingDFTError,
    UsageError,
)
from .grid import Grid, Profile, build_grid, centered_grid, integrate, laplacian_apply
from .potentials import (
    BoxWell,
    ConstantEnvelope,
    Harmonic,
    Hartree,
    Linear,
    PotentialSpec,
    SinusoidalEnvelope,
    SoftenedCoulomb,
    TimeDrive,
    evaluate_energy,
    evaluate_field,
)
from .scf import SCFConfig, SCFResult, free_energy, run_scf
from .spectral import (
    Occupancy,
    Spectrum,
    density_from_spectrum,
    diagonalize,
    q_from_spectrum,
    solve_mu,
)
from .tdks import TDState, density_at_time, init_from_spectrum, observables, step

__version__ = "0.1.0"
