"""Exception types shared across the package."""


class RodLqrError(Exception):
    """Base class for all package errors."""


class BracketingError(RodLqrError):
    """A guaranteed sign change could not be bracketed (internal bug)."""


class NewtonDiverged(RodLqrError):
    """Newton iteration for a closed-loop root left its safe domain.

    Carries the mode index so callers can tell which root failed.
    """

    def __init__(self, mode, message=""):
        self.mode = mode
        super().__init__(message or f"Newton diverged for mode {mode}")


class SingularSystem(RodLqrError):
    """The assembled linear system for a cost tensor is numerically singular."""


class AreSolveFailure(RodLqrError):
    """The stabilizing Riccati solution could not be isolated."""


class ResonanceError(RodLqrError):
    """A homological equation of the power-series expansion is singular."""


class NonFiniteState(RodLqrError):
    """A time step produced a non-finite state (treated as divergence)."""


class NonMonotoneVerdict(RodLqrError):
    """A basin sweep contradicts the assumed monotone convergence-in-level.

    ``results`` holds the (level, verdict) pairs computed before detection,
    so partial data is reported rather than guessed around.
    """

    def __init__(self, message, results=None):
        self.results = results or []
        super().__init__(message)


class ConfigError(RodLqrError):
    """Invalid configuration input (unknown key, bad value, bad file)."""
