"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid configuration or empty problem instance."""


class DomainError(ValueError):
    """An argument lies outside the domain of a scheduling formula."""


class ValidationError(ValueError):
    """A workload or mapping failed validation."""


class WorkloadParseError(ValidationError):
    """A workload CSV row could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SimulationError(RuntimeError):
    """The event loop hit an inconsistent state."""
