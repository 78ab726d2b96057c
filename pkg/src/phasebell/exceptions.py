"""Exception hierarchy shared across the package."""


class PhaseBellError(Exception):
    """Base class for all errors raised by phasebell."""


class InvalidModelError(PhaseBellError, ValueError):
    """A distribution, kernel or record model is malformed or not normalizable."""


class InsufficientDataError(PhaseBellError, ValueError):
    """Too few samples, windows or segments for the requested estimate."""


class DegenerateStateError(PhaseBellError, ArithmeticError):
    """The reduced two-qubit state is undefined (zero trace or collapsed subspace)."""


class InvalidVisibilityError(PhaseBellError, ValueError):
    """A coherence or visibility exceeds unit modulus."""


class InvalidObservableError(PhaseBellError, ValueError):
    """A Pauli label or coefficient is malformed."""


class ConfigurationError(PhaseBellError, ValueError):
    """Run or signal-processing parameters violate a precondition."""
