"""Exception types raised across the package.

The CLI maps these onto exit codes: ``ModelError`` subclasses exit with 2,
``SpecError``/``ConfigError`` with 3 and ``NotConverged`` with 4.
"""

from __future__ import annotations


class NeqSteadyError(Exception):
    """Base class for every error raised by this package."""


class SpecError(NeqSteadyError, ValueError):
    """An input violates a documented precondition."""


class DuplicateCoupling(SpecError):
    pass


class DomainError(SpecError):
    pass


class ConfigError(SpecError):
    """Malformed or inconsistent configuration file / CLI options."""


class ModelError(NeqSteadyError):
    """The model or a numerical solve cannot produce a valid result."""


class NotHermitian(ModelError):
    pass


class NoConvergence(ModelError):
    pass


class Singular(ModelError):
    pass


class NonPositiveSpectrum(ModelError):
    pass


class UndampedMode(ModelError):
    pass


class NegativeOccupation(ModelError):
    pass


class StepTooLarge(ModelError):
    pass


class ResonantBus(ModelError):
    pass


class NotDegenerate(ModelError):
    pass


class NotConverged(NeqSteadyError):
    """Fock-space relaxation stopped at t_final without settling."""
