"""Exception hierarchy shared by every fmrforge module."""


class FmrForgeError(Exception):
    """Base class for all fmrforge errors."""


class ParseError(FmrForgeError, ValueError):
    """A library, netlist or PLA document is malformed.

    ``locus`` names the offending line or JSON field when known.
    """

    def __init__(self, message, locus=None):
        self.locus = locus
        if locus is not None:
            message = f"{locus}: {message}"
        super().__init__(message)


class ValidationError(FmrForgeError, ValueError):
    """A structurally parsed object violates a model invariant."""


class CapExceededError(FmrForgeError):
    """Exhaustive enumeration would exceed the configured n+m cap."""

    def __init__(self, n, m, cap):
        self.n, self.m, self.cap = n, m, cap
        super().__init__(
            f"n+m = {n}+{m} = {n + m} exceeds the enumeration cap {cap}; "
            "use the Monte Carlo estimator (--samples) or raise the cap"
        )
