"""Exception types raised by the simulation package."""


class ConfigurationError(ValueError):
    """Invalid configuration value or invariant violation.

    The message always starts with the name of the offending field so the
    command-line front end can report it as is.
    """


class CalibrationError(ValueError):
    """A calibration table cannot be built or violates its invariants."""
