"""Exception taxonomy.

Every error carries a stable ``code`` string so the command line front end can
report machine-readable failure categories and pick exit statuses.
"""

from __future__ import annotations


class PGroupLabError(Exception):
    """Base class for all package errors."""

    code = "ERROR"


class WordSyntaxError(PGroupLabError):
    """Malformed word or catalog text; ``offset`` is a byte position, ``line`` a 1-based line number."""

    code = "SYNTAX_ERROR"

    def __init__(self, message, offset=None, line=None):
        detail = message
        if line is not None:
            detail = f"line {line}: {message}"
        elif offset is not None:
            detail = f"offset {offset}: {message}"
        super().__init__(detail)
        self.offset = offset
        self.line = line


class UnknownGeneratorError(PGroupLabError):
    code = "UNKNOWN_GENERATOR"


class DuplicateNameError(PGroupLabError):
    code = "DUPLICATE_NAME"


class EnumerationLimitError(PGroupLabError):
    code = "ENUMERATION_LIMIT"


class OrderMismatchError(PGroupLabError):
    code = "ORDER_MISMATCH"


class NotNormalError(PGroupLabError):
    code = "NOT_NORMAL"


class NotPrimePowerError(PGroupLabError):
    code = "NOT_PRIME_POWER"


class NotAbelianError(PGroupLabError):
    code = "NOT_ABELIAN"


class NotNilpotentError(PGroupLabError):
    code = "NOT_NILPOTENT"


class TooLargeError(PGroupLabError):
    code = "TOO_LARGE"


class AbelianInputError(PGroupLabError):
    code = "ABELIAN_INPUT"


class ClassTooHighError(PGroupLabError):
    code = "CLASS_TOO_HIGH"


class ConsistencyError(PGroupLabError):
    """An internal cross-check failed; indicates a bug or corrupted input, never a math fact."""

    code = "CONSISTENCY_FAIL"


class BadSubgroupError(PGroupLabError):
    code = "BAD_SUBGROUP"


class HypothesisFailError(PGroupLabError):
    code = "HYPOTHESIS_FAIL"


class CatalogIOError(PGroupLabError):
    code = "IO_ERROR"


class NotFoundError(PGroupLabError):
    code = "NOT_FOUND"


class BadInvariantsError(PGroupLabError):
    code = "BAD_INVARIANTS"
