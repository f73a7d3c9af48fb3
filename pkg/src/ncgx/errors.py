"""Exception hierarchy shared by every ncgx module."""


class NcgxError(Exception):
    """Base class for all errors raised by ncgx."""


class MixedParity(NcgxError):
    pass


class SpaceMismatch(NcgxError):
    pass


class ParityMismatch(NcgxError):
    pass


class NonConvergence(NcgxError):
    pass


class InvalidGroupLaw(NcgxError):
    pass


class EmptyWindow(NcgxError):
    pass


class MarginTooLarge(NcgxError):
    pass


class WindowOverflow(NcgxError):
    """A product of group elements left the truncation window."""


class NoRealStructure(NcgxError):
    pass


class ZerothOrderViolation(NcgxError):
    def __init__(self, message, pair=None, residual=None):
        super().__init__(message)
        self.pair = pair
        self.residual = residual


class MissingUnitaries(NcgxError):
    pass


class MissingJ(NcgxError):
    pass


class ActionDoesNotPreserveAlgebra(NcgxError):
    pass


class AlgebraNotClosed(NcgxError):
    pass


class AlgebraMismatch(NcgxError):
    pass


class GroupNotFinite(NcgxError):
    pass


class GroupNotAbelian(NcgxError):
    pass


class WrongStarConvention(NcgxError):
    pass


class AmbiguousBaseKO(NcgxError):
    pass


class TableRowMismatch(NcgxError):
    pass


class KOShiftMismatch(NcgxError):
    pass


class HypothesisNotMet(NcgxError):
    def __init__(self, message, hypothesis=None):
        super().__init__(message)
        self.hypothesis = hypothesis


class ZeroWeightElement(NcgxError):
    pass


class NotGInvariant(NcgxError):
    pass


class NotOrientation(NcgxError):
    pass


class SchemaError(NcgxError):
    pass
