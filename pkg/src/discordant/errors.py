"""Exception hierarchy shared by every module."""


class DiscordantError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DiscordantError, ValueError):
    """Input violates a named invariant (hermiticity, trace, positivity, ...)."""

    def __init__(self, invariant, message=None):
        self.invariant = invariant
        super().__init__(message or f"invariant violated: {invariant}")


class CPViolation(ValidationError):
    """Mueller matrix fails one of the two complete-positivity conditions."""

    def __init__(self, margins, message=None):
        self.margins = tuple(float(x) for x in margins)
        msg = message or "complete positivity violated: margins cp1=%.6g, cp2=%.6g" % self.margins
        super().__init__("cp", msg)


class ShapeError(DiscordantError, ValueError):
    """Matrix does not have the required X (or sub-X) shape."""

    def __init__(self, offending, message=None):
        self.offending = list(offending)
        if message is None:
            listed = ", ".join(f"[{j},{k}]={v:.3g}" for j, k, v in self.offending[:8])
            message = f"not an X-state: nonzero forbidden entries {listed}"
        super().__init__(message)


class DomainError(DiscordantError, ValueError):
    """Argument outside the domain of a formula."""


class DegenerateInputError(DomainError):
    """Input sits on a degenerate boundary where a formula has no value (e.g. |m03| = 1)."""


class SingularityError(DiscordantError, ArithmeticError):
    """Formula diverges at the requested point."""


class UnsupportedReconstructionError(DiscordantError):
    """State cannot be rebuilt from ellipsoid data alone (flat ellipsoids)."""


class UnphysicalElementError(DiscordantError, ValueError):
    """Measurement element yields non-positive outcome probability for this state."""


class OracleConvergenceError(DiscordantError):
    """Brute-force search failed on every restart."""

    def __init__(self, best_value, message=None):
        self.best_value = best_value
        super().__init__(message or f"oracle did not converge; best value found {best_value!r}")
