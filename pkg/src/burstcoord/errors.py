class IngestError(ValueError):
    """Raised when an input record cannot be turned into a valid event."""


class ContractError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class ParameterError(ValueError):
    """Raised for out-of-range configuration parameters."""


class FitError(RuntimeError):
    """Raised when a distribution fit cannot be carried out."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InsufficientDataError(ContractError):
    """Raised when valid input holds too little data to produce a result."""
