"""Exception hierarchy shared by all infospace modules."""


class InfospaceError(Exception):
    """Base class for every error raised by this package."""


class DomainError(InfospaceError, ValueError):
    """An argument lies outside the domain of the operation."""


class EvaluationError(InfospaceError, ArithmeticError):
    """A user-supplied function returned a non-finite value."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConvergenceError(InfospaceError, RuntimeError):
    """An iterative method did not reach its tolerance."""


class StiffnessError(ConvergenceError):
    """The adaptive step size underflowed."""


class DivergenceError(InfospaceError, ArithmeticError):
    """The integrated state became non-finite."""


class BracketError(InfospaceError, ValueError):
    """A root bracket does not contain a sign change."""


class SearchError(InfospaceError, RuntimeError):
    """No sign change was found while scanning for an energy level."""

    def __init__(self, message, seed=None, n=None):
        super().__init__(message)
        self.seed = seed
        self.n = n


class BoundaryEscapeError(InfospaceError, RuntimeError):
    """A classical trajectory reached the chart boundary at q = 0 or q = 1."""

    def __init__(self, message, last_state=None, partial=None):
        super().__init__(message)
        self.last_state = last_state
        self.partial = partial
