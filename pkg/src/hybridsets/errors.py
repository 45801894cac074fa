"""Exception types shared across the package."""


class HybridError(Exception):
    """Base class for all errors raised by this package."""


class UniverseMismatchError(HybridError):
    """Two hybrid sets over different universes were combined."""


class MultiplicityOverflowError(HybridError, ArithmeticError):
    """A multiplicity or exponent left the signed 64-bit range."""


class NotReducibleError(HybridError):
    """A hybrid set with a multiplicity other than 0 or 1 was reduced."""


class ValuationError(HybridError):
    """A symbolic parameter had no value in the supplied valuation."""


class UnimodularError(HybridError):
    """An integer matrix expected to have determinant +-1 does not."""


class RefinementError(HybridError):
    """A refinement does not line up with the partition it should refine."""


class NonEvaluableError(HybridError):
    """Evaluation produced a residue that is not a function value."""


class OpacityError(HybridError):
    """A scalar value was required from an atom declared without a body."""


class ContractError(HybridError):
    """An operation was called outside its declared contract."""


class ParseError(HybridError):
    """Source text could not be parsed.  Carries line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", col {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)
