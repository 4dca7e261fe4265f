"""Exception hierarchy shared by the library and the command line."""


class DipStrError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DipStrError, ValueError):
    """Malformed user input: allele labels, database or case files."""


class AlleleParseError(InputError):
    pass


class ModelError(DipStrError, ValueError):
    """The data cannot be handled by the configured model (e.g. m < k_b)."""


class OracleStarvedError(DipStrError, RuntimeError):
    """No importance sample had positive weight."""
