"""Exception types shared across the toolkit.

Every failure mode that callers are expected to branch on gets its own
class; plain ``ValueError`` is reserved for malformed arguments.
"""

from __future__ import annotations


class NsgError(Exception):
    """Base class for toolkit-specific failures."""


class ConfigError(NsgError, ValueError):
    """Raised for malformed or unknown run-configuration input.

    Parameters
    ----------
    message:
        Human-readable description.
    line:
        1-based line number in the config file, when known.
    key:
        Offending ``section.key`` path, when known.
    """

    def __init__(self, message: str, *, line: int | None = None, key: str | None = None):
        details = []
        if key is not None:
            details.append(f"key {key!r}")
        if line is not None:
            details.append(f"line {line}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.line = line
        self.key = key


class GevreyOverflowError(NsgError, OverflowError):
    """Exponential frequency weight would overflow the float range.

    ``shell`` records the smallest offending l1 frequency shell.
    """

    def __init__(self, shell: int, weight: float):
        super().__init__(
            f"exponential weight exp({weight:g} * |k|_1) overflows float64 "
            f"starting at shell |k|_1 = {shell}"
        )
        self.shell = shell
        self.weight = weight


class BlowupError(NsgError, RuntimeError):
    """Time stepping produced non-finite values.

    ``t_last`` is the last time with a finite field.
    """

    def __init__(self, t_last: float):
        super().__init__(f"solution lost finiteness; last good time t = {t_last:.6g}")
        self.t_last = t_last


class FixedPointDivergenceError(NsgError, RuntimeError):
    """Picard iteration failed to contract; ``report`` holds the ratios."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ScheduleMismatchError(NsgError, ValueError):
    """A time-indexed weight schedule does not cover the samples it is applied to."""


class DiagnosticImpossibleError(NsgError, RuntimeError):
    """A diagnostic could not produce a single finite value at any sample."""
