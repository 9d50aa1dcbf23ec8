"""Exception types shared across the package."""

from __future__ import annotations


class CutinSimError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CutinSimError, ValueError):
    """An operation received a value outside its domain (non-finite, negative gap, ...)."""


class UndefinedSensitivityError(CutinSimError, ValueError):
    """TTC sensitivities requested where TTC is infinite (non-closing traffic)."""


class InsufficientDataError(CutinSimError, ValueError):
    """Fewer than two finite samples available for a distribution fit."""


class DegenerateDistributionError(CutinSimError, ValueError):
    """Zero spread (or non-positive sigma) makes a Gaussian fit or CDF meaningless."""


class SchemaError(CutinSimError, ValueError):
    """A CSV file does not carry the expected column header."""


class ParseError(CutinSimError, ValueError):
    """A CSV row could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ConfigError(CutinSimError, ValueError):
    """A run configuration is invalid. The message names the offending key."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
