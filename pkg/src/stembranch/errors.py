"""Exception hierarchy for numerical failure modes.

Every numerical routine raises a subclass of :class:`NumericsError` so callers
(and the CLI) can distinguish "the math refused" from programming errors.
"""


class NumericsError(Exception):
    """Base class for all numerical errors raised by this package."""


class ConvergenceError(NumericsError):
    """A series or iteration hit its term budget before reaching tolerance."""


class DomainError(NumericsError):
    """Arguments outside the domain a routine is able to evaluate."""


class DegenerateParameterError(NumericsError):
    """Parameters hit a measure-zero degeneracy (gamma poles, coincident
    exponents, vanishing denominators) where the closed form breaks down."""


class SingularTransformError(NumericsError):
    """The variable transform feeding a closed form is singular (y too close
    to 1)."""


class StepUnderflowError(NumericsError):
    """The ODE integrator would need a step below its floor to meet tolerance."""


class UnsupportedRegimeError(NumericsError):
    """No closed-form result covers this parameter regime; use a numerical
    method instead."""


class InternalConsistencyError(NumericsError):
    """A value that must be real came out with a non-negligible imaginary
    part; indicates a branch-cut or degeneracy problem upstream."""


class TruncationWarning(UserWarning):
    """Some simulated replicates hit the cell/event caps and were counted
    conservatively (as non-extinct)."""
