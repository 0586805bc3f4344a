"""Exception hierarchy shared by the model, analysis, and probability layers.

Every exception carries a stable machine-readable ``code`` so the CLI and the
HTTP service can map failures to exit statuses / response bodies without
string matching.
"""

from __future__ import annotations


class AfdtError(Exception):
    """Base class for all toolkit errors."""

    code = "ERROR"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownLeafError(AfdtError):
    """An assignment or probability map names an id that is not a leaf."""

    code = "UNKNOWN_LEAF"


class InvalidModelError(AfdtError):
    """A structural violation was hit while operating on an unvalidated model."""

    code = "INVALID_MODEL"


class UnknownDefenseError(AfdtError):
    """A defense configuration names an id that is not a BDS leaf."""

    code = "UNKNOWN_DEFENSE"


class BudgetExceededError(AfdtError):
    """A cut set family grew past the configured cap."""

    code = "BUDGET_EXCEEDED"


class TooManyDefensesError(AfdtError):
    """A defense-subset sweep would enumerate more subsets than the cap."""

    code = "TOO_MANY_DEFENSES"


class TooLargeError(AfdtError):
    """The model has more risk leaves than exhaustive enumeration allows."""

    code = "TOO_LARGE"


class MissingProbError(AfdtError):
    """A risk leaf has no entry in the probability assignment."""

    code = "MISSING_PROB"


class BadProbError(AfdtError):
    """A probability is outside [0, 1]."""

    code = "BAD_PROB"


class SchemaError(AfdtError):
    """A JSON model document does not match the interchange schema.

    ``path`` is a JSON pointer to the offending location.
    """

    code = "SCHEMA_ERROR"

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
