"""Exception hierarchy shared by all modules."""


class TGGError(Exception):
    """Base class for every error raised by this package."""


class InputError(TGGError, ValueError):
    """Rejected input: malformed graph, mismatched type graphs, bad history."""


class TypeGraphMismatch(InputError):
    pass


class InvalidMatch(InputError):
    pass


class HistoryError(InputError):
    pass


class ApplicationError(TGGError):
    """A rule could not be applied at the requested match."""


class DanglingConditionError(ApplicationError):
    def __init__(self, edge, node):
        super().__init__(
            f"dangling condition violated: edge {edge!r} is incident to deleted "
            f"node {node!r} but is not deleted itself"
        )
        self.edge = edge
        self.node = node


class NotApplicable(ApplicationError):
    pass


class DeterminismError(TGGError):
    """Two applicable matches translate overlapping source elements."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class NonTerminationError(TGGError):
    pass


class VerificationError(TGGError):
    """The multi-version result disagrees with the per-version results."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
