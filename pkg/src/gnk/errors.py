"""Exception types raised across the package."""

__all__ = [
    "GnkError", "OutOfDomainError", "CompositionError", "DegenerateFrameError",
    "NotASectionError", "NotSemiholonomicError", "InversionError",
    "NewtonError", "NotHyperregularError", "RankDropError",
    "AdmissibilityError", "GridError", "StabilityError", "ConfigError",
]


class GnkError(Exception):
    """Base class for all package errors."""


class OutOfDomainError(GnkError):
    """A point fell outside a chart's coordinate box."""


class CompositionError(GnkError):
    """Source/target (or dimension) mismatch in a composition or product."""


class DegenerateFrameError(GnkError):
    """A jet element's base-frame block is singular or near-singular."""


class NotASectionError(GnkError):
    """A map expected to be a section fails the projection identity."""


class NotSemiholonomicError(GnkError):
    """A second-order element fails the semiholonomy constraint."""


class InversionError(GnkError):
    """Newton inversion of a bisection's base diffeomorphism failed."""


class NewtonError(GnkError):
    """A Newton solve (e.g. fibre-derivative inversion) did not converge."""


class NotHyperregularError(GnkError):
    """The fibre Hessian of a Lagrangian density is singular."""


class RankDropError(GnkError):
    """A kernel/rank computation found an unexpected rank."""


class AdmissibilityError(GnkError):
    """A symmetry generator fails the admissibility gate for the scenario."""


class GridError(GnkError):
    """A grid index or region is malformed or out of range."""


class StabilityError(GnkError):
    """A solver stability condition (e.g. CFL bound) is violated."""


class ConfigError(GnkError):
    """A scenario configuration file is malformed."""
