"""Exception types shared across the package."""


class ScarforgeError(Exception):
    """Base class for all package errors."""


class CapacityError(ScarforgeError, ValueError):
    """Requested register is outside the supported qubit range."""


class GateError(ScarforgeError, ValueError):
    """Gate is malformed or does not fit the register it is applied to."""


class DimensionError(ScarforgeError, ValueError):
    """Operands live in spaces of different dimension."""


class CircuitParseError(ScarforgeError, ValueError):
    """A serialized circuit document violates the schema."""

    def __init__(self, message: str, gate_index: int | None = None):
        if gate_index is not None:
            message = f"gate {gate_index}: {message}"
        super().__init__(message)
        self.gate_index = gate_index


class ConvergenceError(ScarforgeError, RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""

    def __init__(self, message: str, step: int | None = None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step
