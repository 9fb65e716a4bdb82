"""Exception types shared across the package."""


class LsHawkesError(Exception):
    """Base class for all lshawkes errors."""


class ModelError(LsHawkesError):
    """Model parameters violate a structural requirement (e.g. branching ratio >= 1)."""


class QuadratureError(LsHawkesError):
    """A numerical integral failed its convergence or resolution guard."""


class ResolutionError(QuadratureError):
    """The time-integral discretization failed the oscillation/refinement guard."""


class FeasibilityError(LsHawkesError):
    """Estimation point violates the finite-observation support conditions."""


class ExplosionError(LsHawkesError):
    """Simulation exceeded the configured event budget (model is near-critical or misconfigured)."""


class BandwidthError(LsHawkesError):
    """Bandwidth plan violates an admissibility condition."""


class InsufficientDataError(LsHawkesError):
    """Not enough records to perform the requested fit."""


class IngestError(LsHawkesError):
    """Event-table file could not be parsed or violates session constraints."""


class DivisionGuardError(LsHawkesError):
    """Poisson normalization attempted with a vanishing mean-density denominator."""
