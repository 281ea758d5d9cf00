"""Exception hierarchy shared across the package.

Input-validation failures subclass :class:`ValidationError`; failures of a
numerical routine to reach its documented tolerance subclass
:class:`NumericalError`.  The CLI maps the former to exit code 2 and the
latter to exit code 3.
"""


class SeqstatError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SeqstatError):
    """Malformed or inconsistent inputs."""


class NumericalError(SeqstatError):
    """A solver failed to meet its convergence contract."""


# ---------------------------------------------------------------- probability

class NegativeWeight(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class AlphabetMismatch(ValidationError):
    pass


class UnknownSymbol(ValidationError):
    pass


class EmptySequence(ValidationError):
    pass


class BadSeed(ValidationError):
    pass


# ---------------------------------------------------------------- divergence

class NegativeAlpha(ValidationError):
    pass


class NotInterior(ValidationError):
    pass


# ---------------------------------------------------------------- fixed points

class NonPositiveGamma(ValidationError):
    pass


class NoSolution(SeqstatError):
    """The threshold equation has no nonzero root for the given rate."""


class GammaOutOfRange(ValidationError):
    pass


class DuplicateDistribution(ValidationError):
    pass


# ---------------------------------------------------------------- optimization

class Infeasible(ValidationError):
    """Empty feasible set, e.g. a negative divergence budget."""


class NonConvergence(NumericalError):
    pass


class EmptyWeights(ValidationError):
    pass


# ---------------------------------------------------------------- classifiers

class LengthMismatch(ValidationError):
    pass


class SteppedAfterStop(SeqstatError):
    pass


class StreamExhausted(SeqstatError):
    """Test stream ended before the sequential test stopped.

    The partial trace recorded so far is attached as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------- simulation

class InsufficientErrors(SeqstatError):
    """Too few error events to estimate a slope from the remaining points."""
