"""Exception hierarchy shared across the package.

Every error that crosses a module boundary derives from DetectorError so
callers (and the CLI) can map failures to stable exit codes.
"""


class DetectorError(Exception):
    """Base class for all package errors."""


# --- segmentation / shuffling ---

class EmptyInput(DetectorError):
    """Input text contains no non-whitespace characters."""


# --- scoring / protocol ---

class BadGeometry(DetectorError):
    """Window-plan preconditions violated (T, W, S out of range)."""


class EmptyTrace(DetectorError):
    """No target positions: token count below 2."""


class ScorerUnavailable(DetectorError):
    """Scorer process could not be started or died mid-session."""


class ProtocolViolation(DetectorError):
    """Scorer sent a malformed or inconsistent protocol message."""


class TokenizationEmpty(DetectorError):
    """Scorer reported fewer than 2 tokens for the text."""


# --- statfit ---

class InvalidParams(DetectorError):
    """Distribution parameters outside the family's valid region."""


class InsufficientData(DetectorError):
    """Too few observations for the requested operation."""


class SupportViolation(DetectorError):
    """Data falls outside the distribution's (fixed) support."""


class OptimizationFailed(DetectorError):
    """Likelihood optimization did not converge after restarts."""


class DegenerateVariance(DetectorError):
    """Both samples have zero variance; Welch's t is undefined."""


# --- repository ---

class EmptyFeatureSet(DetectorError):
    """No feature type had any family pass the goodness-of-fit gate."""


class SchemaMismatch(DetectorError):
    """Repository file has a wrong version or missing fields."""


class CorruptFile(DetectorError):
    """Repository file is not parseable."""


# --- inference ---

class UnknownFeature(DetectorError):
    """Feature type not present in the repository's fitted set."""


class ZeroDensitySum(DetectorError):
    """Both class densities are zero; ensemble probability undefined."""


class DivisionDomain(DetectorError):
    """Uncertainty-threshold variant requires a positive MGT probability."""


# --- evaluation ---

class LengthMismatch(DetectorError):
    """Decisions and labels are not aligned."""


class AllRejected(DetectorError):
    """Every instance of a class was rejected; its rate is undefined."""


class EmptyGroup(DetectorError):
    """A grid-search group has no usable records."""


class ParseError(DetectorError):
    """Dataset file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


# --- cli ---

class UsageError(DetectorError):
    """Bad command line; maps to exit code 1."""
