"""Exception hierarchy shared by all solver modules."""


class RoughHJError(Exception):
    """Base class for library errors."""


class ArgumentError(RoughHJError, ValueError):
    """An argument is outside its admissible range."""


class PreconditionError(RoughHJError):
    """Inputs violate a mathematical precondition of the requested solver."""


class CFLError(RoughHJError):
    """A time step would break the monotonicity (CFL) condition of a scheme."""


class FlowDegeneracyError(RoughHJError):
    """An ODE flow lost strict monotonicity in its initial value."""


class IntegrationError(RoughHJError):
    """An ODE integration produced non-finite values."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
