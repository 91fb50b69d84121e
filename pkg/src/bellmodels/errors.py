"""Exception hierarchy shared by every module.

Each error carries a stable ``code`` string so callers (and the CLI) can
branch on the failure kind without matching on message text.
"""
from __future__ import annotations

from fractions import Fraction


class BellModelError(ValueError):
    code = "ERROR"


class ValidationError(BellModelError):
    code = "VALIDATION"


class NegativeMass(ValidationError):
    code = "NEGATIVE_MASS"

    def __init__(self, key, value):
        self.key = key
        self.value = value
        super().__init__(f"negative mass {value} at {key!r}")


class NotNormalized(ValidationError):
    code = "NOT_NORMALIZED"

    def __init__(self, total: Fraction, where=None):
        self.total = total
        self.deficit = 1 - total
        suffix = "" if where is None else f" for {where!r}"
        super().__init__(f"masses sum to {total}{suffix} (deficit {self.deficit})")


class AlphabetViolation(ValidationError):
    code = "ALPHABET_VIOLATION"


class InvalidSetting(ValidationError):
    code = "INVALID_SETTING"


class ZeroSettingMass(BellModelError):
    code = "ZERO_SETTING_MASS"

    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"setting pair {pair} has zero mass; its conditional is undefined")


class EmptySheet(ValidationError):
    code = "EMPTY_SHEET"


class ResponseUndefined(BellModelError):
    code = "RESPONSE_UNDEFINED"


class ZeroDetection(BellModelError):
    code = "ZERO_DETECTION"


class NotCertifiable(BellModelError):
    """A model cannot be expressed as a local model over binary outcomes."""

    code = "NOT_CERTIFIABLE"


class InternalBoundViolation(AssertionError):
    """A local model produced |S| > 2. Unreachable unless the code is broken."""

    code = "INTERNAL_BOUND_VIOLATION"


class EmptyTrials(BellModelError):
    code = "EMPTY_TRIALS"


class MismatchedPairs(BellModelError):
    code = "MISMATCHED_PAIRS"
