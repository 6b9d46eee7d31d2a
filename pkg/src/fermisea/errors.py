"""Exception hierarchy shared by all fermisea modules."""


class FermiSeaError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FermiSeaError, ValueError):
    """Model coupling outside its admissible range."""


class RangeError(FermiSeaError, ValueError):
    """Evaluation outside the tabulated range of a custom charge."""


class ConfigError(FermiSeaError, ValueError):
    """Malformed sea, block, excitation or run configuration."""


class SingularSystemError(FermiSeaError, ArithmeticError):
    """The Nystrom matrix is numerically singular."""


class NonConvergenceError(FermiSeaError, ArithmeticError):
    """An iterative solve failed to reach its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ConsistencyError(FermiSeaError, ArithmeticError):
    """Two routes to the same quantity disagree."""


class AlignmentError(FermiSeaError, ValueError):
    """Two finite states do not differ by a single excitation."""


class TailTruncationError(FermiSeaError, ArithmeticError):
    """A tail integral failed to converge under node doubling."""


class SymmetryError(FermiSeaError, ValueError):
    """A symmetric-case routine was given an asymmetric configuration."""

    def __init__(self, message, asymmetry=None):
        super().__init__(message)
        self.asymmetry = asymmetry


class ParityError(FermiSeaError, ValueError):
    """Symmetric quantum numbers with mismatched parity."""


class PlacementError(FermiSeaError, ValueError):
    """Impurity rapidity in the wrong region (particle inside / hole outside)."""
