"""Exception hierarchy.

ConfigError maps to CLI exit code 1, DataError (and subclasses) to exit
code 2.
"""


class DictnerError(Exception):
    pass


class ConfigError(DictnerError):
    """Bad usage, bad config file, or inconsistent options."""


class DataError(DictnerError):
    """Malformed or unusable input data."""


class IoError(DataError):
    """File could not be read or written."""


class EmptyLine(DataError):
    """A line produced no tokens."""


class AllLinesEmpty(DataError):
    """An input file produced no usable records."""


class MalformedLine(DataError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class DimensionMismatch(DataError):
    def __init__(self, lineno, expected, got):
        super().__init__(f"line {lineno}: expected {expected} values, got {got}")
        self.lineno = lineno


class LabelOutOfRange(DataError):
    pass


class EmptyLatticePosition(DataError):
    pass


class EmptyAllowedSet(DataError):
    pass


class BackwardWithoutForward(DictnerError):
    """backward() called on a tensor with no recorded computation."""


class NonFiniteGradient(DictnerError):
    pass


class SupervisionEmpty(DataError):
    """Distant matching produced no spans anywhere in the training corpus."""


class LengthMismatch(DataError):
    pass


class CheckpointModelKindMismatch(ConfigError):
    pass
