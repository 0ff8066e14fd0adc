"""Exception types shared across the toolkit.

Every error carries a stable ``code`` string so CLI output and persisted
records can name failures without depending on Python class names.
"""

from __future__ import annotations


class TlgkitError(Exception):
    """Base class for all toolkit errors."""

    code = "TLGKIT_ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class InvalidTargetError(TlgkitError):
    """A target-length string or integer is not one of the nine values."""

    code = "INVALID_TARGET"


class EmptyEvaluationError(TlgkitError):
    """Scoring was requested over zero items."""

    code = "EMPTY_EVALUATION"


class InsufficientSourceError(TlgkitError):
    """More samples were requested than source questions exist."""

    code = "INSUFFICIENT_SOURCE"


class EmptyRequestError(TlgkitError):
    """A build was requested for zero entries."""

    code = "EMPTY_REQUEST"


class DatasetFormatError(TlgkitError):
    """A persisted record file is malformed; carries the 1-based line number."""

    code = "MALFORMED_RECORD"

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NoAnswersError(TlgkitError):
    """Longest-answer selection was called with no candidates."""

    code = "NO_ANSWERS"


class UnknownTemplateError(TlgkitError):
    code = "UNKNOWN_TEMPLATE"


class BackendConfigError(TlgkitError):
    """Run-level backend misconfiguration (bad endpoint, bad style)."""

    code = "INVALID_BACKEND"


class PrefillUnsupportedError(TlgkitError):
    """Forced-prefix generation requested on a backend that cannot prefill."""

    code = "PREFILL_UNSUPPORTED"


class ReportMismatchError(TlgkitError):
    """Treated and baseline score reports cover different targets."""

    code = "REPORT_MISMATCH"


class DistributionUndefinedError(TlgkitError):
    """Token-distribution report requested with zero parsed tokens."""

    code = "DISTRIBUTION_UNDEFINED"


class AddressInUseError(TlgkitError):
    code = "ADDRESS_IN_USE"
