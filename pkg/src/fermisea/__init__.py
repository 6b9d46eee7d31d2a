"""Dressed quantities and finite-size spectra of split Fermi seas in
Bethe-ansatz integrable models."""

from .dressed import DressedState, counts, dress, seas_from_blocks, symmetric_matrices
from .errors import (
    AlignmentError,
    ConfigError,
    ConsistencyError,
    DomainError,
    FermiSeaError,
    NonConvergenceError,
    ParityError,
    PlacementError,
    RangeError,
    SingularSystemError,
    SymmetryError,
    TailTruncationError,
)
from .finite_bethe import (
    ExcitationSpec,
    FiniteState,
    block_state,
    discrete_shift,
    excited_state,
    observables,
    quantum_numbers_from_blocks,
    solve_bethe,
)
from .invariants import run_invariants
from .model import BareCharge, ModelKind, ModelSpec, make_model
from .quadrature import Grid, GridFunction, SeaConfig, build_grid, solve_fredholm
from .spectrum import (
    SpectrumReport,
    SpectrumRequest,
    bulk_energy,
    finite_size_delta,
    impurity_delta,
    impurity_terms,
    symmetric_delta,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "BareCharge",
    "ConfigError",
    "ConsistencyError",
    "DomainError",
    "DressedState",
    "ExcitationSpec",
    "FermiSeaError",
    "FiniteState",
    "Grid",
    "GridFunction",
    "ModelKind",
    "ModelSpec",
    "NonConvergenceError",
    "ParityError",
    "PlacementError",
    "RangeError",
    "SeaConfig",
    "SingularSystemError",
    "SpectrumReport",
    "SpectrumRequest",
    "SymmetryError",
    "TailTruncationError",
    "block_state",
    "build_grid",
    "bulk_energy",
    "counts",
    "discrete_shift",
    "dress",
    "excited_state",
    "finite_size_delta",
    "impurity_delta",
    "impurity_terms",
    "make_model",
    "observables",
    "quantum_numbers_from_blocks",
    "run_invariants",
    "seas_from_blocks",
    "solve_bethe",
    "solve_fredholm",
    "symmetric_delta",
    "symmetric_matrices",
]
