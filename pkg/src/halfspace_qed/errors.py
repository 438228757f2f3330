"""Exception and warning types raised across the package."""


class HalfspaceError(Exception):
    """Base class for all errors raised by :mod:`halfspace_qed`."""


class DomainError(HalfspaceError, ValueError):
    """An argument lies outside the domain of the requested function."""


class PoleError(DomainError, ZeroDivisionError):
    """The Lorentz denominator of the permittivity vanishes."""


class DegenerateError(DomainError):
    """A normalisation or Fresnel denominator vanishes."""


class UnknownStateError(HalfspaceError, KeyError):
    """An atomic level label is not part of the model."""


class ResonanceError(DomainError):
    """A static polarizability was requested for a state with a lower-lying
    dipole partner, for which the static sum is not defined."""


class ZeroRateError(DomainError):
    """The free-space rate used for normalisation vanishes."""


class QuadratureError(HalfspaceError, ArithmeticError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonConvergenceError(QuadratureError):
    """Adaptive refinement hit ``max_subdivisions`` before converging."""


class DecayMisdeclaredError(QuadratureError):
    """Most of a semi-infinite integral lies beyond the declared decay range."""


class ConvergenceError(QuadratureError):
    """A truncated z-integral cannot converge because its damping is too weak."""


class ConfigError(HalfspaceError, ValueError):
    """Malformed or inconsistent run configuration."""


class BranchPointWarning(RuntimeWarning):
    """Evaluation requested at (or numerically at) the light-cone branch point."""


class UnderdampedWarning(RuntimeWarning):
    """The medium damping is not small compared with its resonance frequency."""


class DegenerateTransitionWarning(RuntimeWarning):
    """A transition with zero frequency was skipped."""
