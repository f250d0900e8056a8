"""Error taxonomy shared across modules.

The CLI maps each class to a distinct exit code so CI can assert negative
tests: configuration problems exit 2, numerical failures exit 3, violated
analytical hypotheses exit 4.
"""
from __future__ import annotations


class LandauError(Exception):
    """Base class for all package errors."""


class ConfigError(LandauError):
    """Invalid or inconsistent configuration input."""

    exit_code = 2


class NumericError(LandauError):
    """Numerical failure during evolution (non-finite state, bad mass)."""

    exit_code = 3


class StiffnessError(NumericError):
    """The stable time step fell below the configured dt_min."""


class HypothesisError(LandauError):
    """An analytical hypothesis required by the requested check is not met."""

    exit_code = 4


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ConfigError, NumericError, HypothesisError)):
        return exc.exit_code
    return 1
