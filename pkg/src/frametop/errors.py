"""Exception hierarchy shared by all modules."""


class FrametopError(Exception):
    """Base class for every error raised by frametop."""


class InputError(FrametopError, ValueError):
    """Malformed user input: unknown labels, bad relations, bad files."""


class ParseError(InputError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ContractViolation(FrametopError, ValueError):
    """A precondition of an operation does not hold for its arguments."""


class ResourceError(FrametopError):
    """An enumeration would exceed the configured size bound."""


class ConsistencyError(FrametopError, AssertionError):
    """Independent methods that must agree returned different answers."""


class TheoremViolation(FrametopError, AssertionError):
    """A statement that holds for all valid inputs failed; carries a witness."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message} (witness: {witness!r})")
