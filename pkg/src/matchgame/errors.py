"""Exception types shared across the package."""


class MatchgameError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MatchgameError):
    """Malformed input: unknown ids, invalid documents, failed preconditions."""


class CapacityError(MatchgameError):
    """An enumeration bound was exceeded; the message names the bound."""
