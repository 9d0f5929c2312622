"""Exception and warning types shared across the package."""

from __future__ import annotations


class SlpnError(Exception):
    """Base class for analysis errors (CLI exit code 1)."""


class ParseError(SlpnError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotEnabledError(SlpnError):
    pass


class InvalidFinalMarking(SlpnError):
    pass


class StateSpaceExceeded(SlpnError):
    """Raised when exploration goes past the configured state cap.

    ``witness`` is the transition sequence leading from the initial state to
    the state whose creation crossed the cap.
    """

    def __init__(self, count: int, witness: list[str]):
        self.count = count
        self.witness = witness
        shown = ", ".join(witness[:30]) + (", ..." if len(witness) > 30 else "")
        super().__init__(
            f"state cap exceeded after {count} states; witness path "
            f"({len(witness)} firings): {shown}"
        )


class SolverError(SlpnError):
    pass


class SlpnWarning(UserWarning):
    pass


class UnboundednessWarning(SlpnWarning):
    pass


class UnreachableFinalWarning(SlpnWarning):
    pass


class LivelockWarning(SlpnWarning):
    pass


class AlphabetWarning(SlpnWarning):
    pass


class NumericalWarning(SlpnWarning):
    pass
