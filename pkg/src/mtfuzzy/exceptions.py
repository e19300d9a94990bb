"""Exception classes shared across the package."""


class MTFuzzyError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MTFuzzyError, ValueError):
    """A value lies outside its admissible range."""


class UsageError(MTFuzzyError, ValueError):
    """Operands are incompatible or an operation is misused."""


class PreconditionError(MTFuzzyError, ValueError):
    """An input violates a documented precondition (e.g. non-reflexive relation)."""


class StructuralOrderError(MTFuzzyError, ValueError):
    """A node would violate the fixed variable order."""


class CapacityError(MTFuzzyError, MemoryError):
    """The node arena reached its configured limit."""


class ParseError(MTFuzzyError, ValueError):
    """Malformed input file.

    ``offset`` is a byte offset for binary formats, ``line`` a 1-based line
    number for text formats; whichever does not apply is None.
    """

    def __init__(self, message, offset=None, line=None):
        self.offset = offset
        self.line = line
        where = ""
        if offset is not None:
            where = f" (at byte {offset})"
        elif line is not None:
            where = f" (line {line})"
        super().__init__(message + where)
