"""beamhom: Fourier-mode homogenization workbench for periodic beam lattices.

Builds the per-mode stiffness symbols of the discrete lattice, its continuum
limit and the Kumar-McDowell variant, solves the periodic equilibrium
problems through Schur-reduced per-mode blocks, and quantifies the
homogenization error (mode-inverse sweeps, optimality maps, convergence
rates, coercivity scans).
"""

__version__ = "0.1.0"

from .fields import CompatibilityError, FieldGrid, SingularSystemError, SolverError
from .fourier import (
    FREQUENCY,
    SPATIAL,
    GridFunction,
    dft,
    dft_direct,
    freq_grids,
    freq_values,
    hs_seminorm,
    idft,
    idft_direct,
    in_freq_set,
    l2_norm,
    parseval_gap,
)
from .beams import (
    AssembledSystem,
    BeamParams,
    ElementStiffness,
    assemble_triangular,
    dense_solve,
    element_stiffness,
    energy_identities_check,
    triangular_energy,
)
from .symbols import (
    CONTINUUM,
    DISCRETE,
    KUMAR_MCDOWELL,
    RECTANGULAR,
    TRIANGULAR,
    LatticeSpec,
    ModeSymbol,
    SchurBlock,
    lambda_min_ratio,
    pde_symbol_rectangular,
    pde_symbol_triangular,
    schur,
    sincos_bound_check,
    spectral_norm,
    stress_symbol_rectangular,
    symbol_continuum,
    symbol_discrete,
    symbol_km,
    verify_strange_identity,
)
from .solvers import LoadSpec, SolutionField, field_errors, solve_field, solve_mode
from .experiments import (
    PAIR_CONTINUUM,
    PAIR_KM,
    ConvergenceReport,
    ErrMapReport,
    SweepConfig,
    SweepReport,
    convergence_study,
    diff_index,
    err_maps,
    fit_loglog,
    max_diff_sweep,
    theory_suite,
)

__all__ = [name for name in dir() if not name.startswith("_")]
