"""Exception types shared across the package.

Every error raised on purpose derives from FuzzycastError so callers (and the
command-line front end) can catch one base class and turn it into a diagnostic
plus a nonzero exit code.
"""


class FuzzycastError(Exception):
    """Base class for all errors raised by this package."""


# --- data loading and alignment ---

class MissingFileError(FuzzycastError):
    pass


class MissingColumnError(FuzzycastError):
    def __init__(self, column: str):
        super().__init__(f"column {column!r} not found in header")
        self.column = column


class UnparseableRowError(FuzzycastError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class InvalidSeriesError(FuzzycastError):
    pass


class EmptyIntersectionError(FuzzycastError):
    pass


class LengthMismatchError(FuzzycastError):
    pass


class TooShortError(FuzzycastError):
    pass


class DegenerateSplitError(FuzzycastError):
    pass


# --- fuzzy inference core ---

class DimensionMismatchError(FuzzycastError):
    pass


class ZeroFiringError(FuzzycastError):
    pass


# --- rule induction ---

class EmptyDataError(FuzzycastError):
    pass


class DegenerateRangeError(FuzzycastError):
    pass


class RuleExplosionError(FuzzycastError):
    pass


class TooManyClustersError(FuzzycastError):
    pass


# --- training ---

class SingularSystemError(FuzzycastError):
    pass


class SingularNormalMatrixError(FuzzycastError):
    pass


# --- forecast pipeline ---

class CyclicWiringError(FuzzycastError):
    pass


class UnknownSignalError(FuzzycastError):
    pass


class InsufficientTestSpanError(FuzzycastError):
    pass


# --- metrics ---

class EmptyRecordError(FuzzycastError):
    pass


class ZeroDenominatorError(FuzzycastError):
    def __init__(self, index: int, which: str = "denominator"):
        super().__init__(f"{which} is zero at sample {index}; relative error undefined")
        self.index = index


# --- configuration / CLI ---

class ConfigError(FuzzycastError):
    pass
