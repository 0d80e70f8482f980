"""Exception types shared across the package."""


class HebbLearnError(Exception):
    """Base class for all errors raised by hebblearn."""


class InvalidInputError(HebbLearnError, ValueError):
    """An argument violates a documented precondition (shape, norm, range)."""


class DataFormatError(HebbLearnError, ValueError):
    """A file or byte stream does not conform to an expected binary/text format."""


class ConfigError(HebbLearnError, ValueError):
    """An experiment configuration field is missing, malformed, or out of bounds."""

    def __init__(self, section: str, key: str, message: str):
        self.section = section
        self.key = key
        super().__init__(f"[{section}] {key}: {message}")
