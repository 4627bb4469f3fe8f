"""Exception hierarchy shared by every tritsim module."""


class TritsimError(Exception):
    """Base class for all tritsim errors."""


class StructuralError(TritsimError):
    """A netlist or gate invocation is malformed (arity, drivers, references)."""


class LogicDomainError(TritsimError, ValueError):
    """A level outside a gate's legal input alphabet reached one of its pins."""


class ConversionError(TritsimError, ValueError):
    """A LogicLevel has no trit equivalent (Unknown)."""


class SimulationFault(TritsimError):
    """A gate evaluation failed during simulation; ``net`` names the culprit."""

    def __init__(self, message, net=None, time=None):
        super().__init__(message)
        self.net = net
        self.time = time


class StimulusError(TritsimError):
    """Stimulus drives a net it is not allowed to drive, or a bad value."""


class BudgetExceeded(TritsimError):
    """Neither a stable state nor a cycle was found within ``max_ticks``."""

    def __init__(self, max_ticks):
        super().__init__(f"no stable state or cycle within {max_ticks} ticks")
        self.max_ticks = max_ticks


class ConfigurationError(TritsimError):
    """Bad measurement or export configuration (for example an unknown net)."""


class NetlistSyntaxError(TritsimError):
    """Raised by :func:`tritsim.parser.parse_or_raise`; carries the diagnostics."""

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0] if self.errors else None
        super().__init__(str(first) if first else "netlist parse failed")
