"""Exception types shared across the package."""


class GbsedError(Exception):
    """Base class for all package errors."""


class SchemaError(GbsedError):
    """Ontology document violates the configuration grammar or invariants."""


class HorizonError(GbsedError):
    """IPM projection point lies at or beyond the vanishing line."""


class OntologyMismatch(GbsedError):
    """Transmitter and receiver disagree on the shared ontology."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class DecodeError(GbsedError):
    """Received adjacency matrix cannot be resolved under the strict policy."""


class ShapeError(GbsedError):
    """Array or list dimensions do not match."""


class CapacityError(GbsedError):
    """Value exceeds what the wire format can carry."""


class FormatError(GbsedError):
    """Payload header or framing is invalid."""

    def __init__(self, message, offset=0):
        super().__init__(message)
        self.offset = offset


class TruncationError(GbsedError):
    """Payload ends before the declared content."""

    def __init__(self, message, offset=0):
        super().__init__(message)
        self.offset = offset


class ParseError(GbsedError):
    """Scene file line is malformed."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class SpecError(GbsedError):
    """Scenario specification is infeasible."""


class DegenerateInput(GbsedError):
    """Input admits no meaningful result (empty sequence, single-class AUC, ...)."""
