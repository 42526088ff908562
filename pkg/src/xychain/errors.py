"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad parameter values or inconsistent profiles."""


class IntegrationError(RuntimeError):
    """The time integrator could not certify the requested accuracy.

    Carries the time at which the worst defect was observed.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConsistencyError(RuntimeError):
    """A numerical invariant was violated beyond tolerance.

    Signals an upstream convention or accuracy bug, not bad user input.
    """


class SizeLimitError(ValueError):
    """Requested brute-force oracle size exceeds the supported bound."""
