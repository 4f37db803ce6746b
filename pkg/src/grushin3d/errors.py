"""Exception types shared by all grushin3d modules."""


class GrushinError(Exception):
    """Base class for all errors raised by this package."""


class InputFault(GrushinError):
    """Inputs violate a documented precondition (maps to CLI exit code 2)."""


class NumericalFault(GrushinError):
    """A numerical procedure failed to meet its contract (CLI exit code 3).

    Carries an optional ``diagnostics`` dict with solver state useful for
    post-mortem inspection.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics) if diagnostics else {}
