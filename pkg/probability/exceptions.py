"""
Exceptions raised by the probability app.

Each error also subclasses the builtin a caller would naturally catch,
so ``except ValueError`` keeps working around library calls.
"""


class DistkitError(Exception):
    """Base class for every error raised by distkit."""


class IncompatibleShapes(DistkitError, ValueError):
    """Two shapes cannot be broadcast together."""


class ShapeError(DistkitError, ValueError):
    """A value's shape does not match what the operation declares."""


class RankError(ShapeError):
    """A requested rank exceeds the rank available."""


class DTypeError(DistkitError, TypeError):
    """Mixed or unsupported dtypes."""


class DomainError(DistkitError, ValueError):
    """An argument lies outside the domain (or support) of an operation."""


class InvalidParameter(DistkitError, ValueError):
    """A distribution or bijector parameter violates its constraints."""


class NaNError(DistkitError, ArithmeticError):
    """A statistic is NaN while ``allow_nan_stats`` is False."""


class NotReparameterized(DistkitError, NotImplementedError):
    """The distribution has no parameter-free noise path."""


class NotInvertible(DistkitError, NotImplementedError):
    """The bijector is a smooth covering and cannot be inverted as a bijector."""


class KLNotImplemented(DistkitError, NotImplementedError):
    """No closed form is registered for a pair of distribution types."""


class DependenceViolation(DistkitError, ValueError):
    """An autoregressive function reads inputs it must not depend on."""


class NonConvergentSpec(DistkitError, ValueError):
    """An autoregressive ``make_dist`` changed its event shape between steps."""


class EmptyPoints(DistkitError, ValueError):
    """A kernel density estimate was requested over zero points."""


class ModelSpecError(DistkitError, ValueError):
    """A model spec document could not be parsed or built."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
