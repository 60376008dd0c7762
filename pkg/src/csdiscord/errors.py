"""Exception hierarchy shared across the package."""


class DiscordError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class NotHermitian(DiscordError):
    pass


class NoConvergence(DiscordError):
    pass


class InvalidState(DiscordError):
    """A matrix failed one of the density-matrix invariants.

    ``invariant`` names the failed check: ``"hermitian"``, ``"trace"``,
    ``"psd"`` or ``"finite"``.
    """

    def __init__(self, message, invariant=None, details=None):
        super().__init__(message)
        self.invariant = invariant
        self.details = details or {}


class WrongShape(DiscordError):
    pass


class WrongCase(DiscordError):
    pass


class DegenerateAngles(DiscordError):
    pass


class SpecError(DiscordError):
    pass


class ParseError(DiscordError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
