"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (non-convergence, indefinite matrix, infeasible step).

    Carries an optional ``diagnostic`` payload (residuals, offending state)
    so callers can report what broke without parsing the message.
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic
