"""Exception hierarchy shared by every module."""


class TreeLearnError(Exception):
    pass


class SignatureError(TreeLearnError, ValueError):
    """An alphabet / leaf set / output set violates its invariants."""


class DuplicateName(SignatureError):
    pass


class NameClash(SignatureError):
    pass


class EmptyOutputSet(SignatureError):
    pass


class MalformedTree(TreeLearnError, ValueError):
    pass


class CarrierTooLarge(TreeLearnError):
    pass


class AutomatonError(TreeLearnError, ValueError):
    pass


class MissingTransition(AutomatonError):
    pass


class ParseError(TreeLearnError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SignatureMismatch(TreeLearnError, ValueError):
    pass


class NotClosedOrConsistent(TreeLearnError):
    pass


class InvariantBreach(TreeLearnError):
    """A runtime-audited invariant of the learning procedure failed."""


class WellDefinednessBreach(InvariantBreach):
    pass


class IterationBudgetExceeded(TreeLearnError):
    pass
