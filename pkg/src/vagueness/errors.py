"""Exception hierarchy.

Everything raised for bad input derives from :class:`ValidationError`, which
the CLI maps to exit code 2. :class:`UnfaithfulFramework` is kept separate so
callers can branch on a metric that fails to separate its exemplars.
"""


class VaguenessError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(VaguenessError, ValueError):
    pass


class SchemaMismatch(ValidationError):
    pass


class ArityMismatch(SchemaMismatch):
    pass


class DuplicateSystemId(ValidationError):
    pass


class NonFiniteFeature(ValidationError):
    pass


class ProvenanceViolation(ValidationError):
    """A metric-determined system was placed in an exemplar set."""


class BoundsViolation(ValidationError):
    """A metric produced a value outside its declared bounds."""


class EmptyClearSet(ValidationError):
    pass


class UnknownSystem(ValidationError):
    pass


class DegenerateInterval(ValidationError):
    pass


class NonZeroFloor(ValidationError):
    pass


class LandmarkMismatch(ValidationError):
    pass


class PreconditionUnmet(ValidationError):
    pass


class InvalidGeneratorConfig(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class UnknownField(ParseError):
    pass


class HeaderMismatch(ParseError):
    pass


class UnfaithfulFramework(VaguenessError):
    """Raised when an operation needs a faithful framework and gets one that is not."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
