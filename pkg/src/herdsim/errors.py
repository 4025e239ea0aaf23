"""Exception hierarchy shared by all herdsim modules.

Two broad groups matter for scripting: `InputError` covers everything wrong
with files, schemas or configuration (CLI exit code 2), `NumericError` covers
estimator and solver failures on formally valid input (CLI exit code 1).
"""


class HerdsimError(Exception):
    """Base class for all herdsim errors."""


class InputError(HerdsimError):
    """Problems with input files, schemas, parameters or configuration."""


class ParseError(InputError):
    """A file could not be parsed; message names the offending row."""


class ValidationError(InputError):
    """Parsed data violates a structural invariant."""


class ConfigError(InputError):
    """A model configuration violates a parameter constraint."""


class InsufficientDataError(InputError):
    """Not enough observations for the requested estimate."""


class NumericError(HerdsimError):
    """Estimator or solver failure on formally valid input."""


class DegenerateSeriesError(NumericError):
    """A series has zero variance (or zero normalization constant)."""


class FitDomainError(NumericError):
    """Curve values are outside the domain of the requested fit."""


class UnsupportedRegimeError(NumericError):
    """Parameters outside the regime where the formula is defined."""
