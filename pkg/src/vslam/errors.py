"""Exception and warning types raised across the package."""


class VslamError(Exception):
    """Base class for all package errors."""


class ConflictingEffect(VslamError, ValueError):
    """An effect contains both a literal and its complement."""


class UnknownAction(VslamError, KeyError):
    def __init__(self, action: str):
        super().__init__(action)
        self.action = action

    def __str__(self) -> str:
        return f"unknown action {self.action!r}"


class UniverseTooLarge(VslamError, ValueError):
    """Exhaustive enumeration requested over too many fluents."""


class InvalidState(VslamError, ValueError):
    """A literal set is not a total, consistent assignment."""


class UpdateAfterCollapse(VslamError):
    """An update was attempted on a collapsed version space component."""


class NegativeWithEmptyLower(UpdateAfterCollapse):
    """A negative demonstration arrived after the precondition lower bound was removed."""


class UpperBoundaryOverflow(VslamError):
    """The precondition upper boundary grew beyond the configured cap."""


class CollapsedSpace(VslamError):
    def __init__(self, action: str, component: str):
        super().__init__(action, component)
        self.action = action
        self.component = component

    def __str__(self) -> str:
        return f"version space of {self.component} for action {self.action!r} collapsed"


class InternalInvariantViolation(VslamError, AssertionError):
    """A property that the learning rules guarantee was found broken."""


class PDDLSyntaxError(VslamError):
    def __init__(self, line: int, col: int, expected: str, found: str | None = None):
        super().__init__(line, col, expected)
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found

    def __str__(self) -> str:
        msg = f"line {self.line}, col {self.col}: expected {self.expected}"
        if self.found is not None:
            msg += f", found {self.found!r}"
        return msg


class UnsupportedFeature(VslamError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unsupported PDDL feature: {self.name}"


class PDDLTypeError(VslamError, TypeError):
    """Ill-typed or unresolved reference in a domain or problem."""


class SchemaMismatch(VslamError, ValueError):
    """A trace record references something the header does not declare."""


class MalformedRecord(VslamError, ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(index, reason)
        self.index = index
        self.reason = reason

    def __str__(self) -> str:
        return f"record {self.index}: {self.reason}"


# Warnings go through the ``warnings`` module so callers can filter or escalate them.


class ConflictingGroundEffect(UserWarning):
    """A ground action was dropped because its literals conflict."""


class NoApplicableAction(UserWarning):
    """A random walk hit a dead end at the initial state."""


class InsufficientNegatives(UserWarning):
    """Fewer failing (state, action) pairs exist than were requested."""
