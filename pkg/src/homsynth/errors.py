"""Exception hierarchy shared by all modules."""


class HomsynthError(Exception):
    pass


class FormatError(HomsynthError, ValueError):
    """Malformed textual input (graph text, JSON artifacts, variable spellings)."""


class InputError(HomsynthError, ValueError):
    """Well-formed input that violates an operation's precondition."""


class CapacityError(HomsynthError):
    """A brute-force or size limit would be exceeded."""


class DecompositionError(InputError):
    pass


class DegreeError(InputError):
    pass


class SupportError(InputError):
    pass


class EvaluationError(HomsynthError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ConsistencyError(HomsynthError):
    """An internal cross-check failed; indicates a bug rather than bad input."""
