"""Exception hierarchy shared by all modules."""


class OstrowskiError(Exception):
    """Base class for every error raised by the package."""


class NonSquarefree(OstrowskiError, ValueError):
    pass


class DegenerateD(OstrowskiError, ValueError):
    pass


class NotPrime(OstrowskiError, ValueError):
    pass


class ResourceExceeded(OstrowskiError, RuntimeError):
    pass


class ImprimitiveForm(OstrowskiError, ValueError):
    pass


class DiscMismatch(OstrowskiError, ValueError):
    pass


class MalformedAction(OstrowskiError, ValueError):
    pass


class ActionNotClosed(OstrowskiError, ValueError):
    pass


class BadPrimePower(OstrowskiError, ValueError):
    pass


class Unsupported(OstrowskiError, NotImplementedError):
    pass


class CurveMismatch(OstrowskiError, ValueError):
    pass


class ShortFormUnavailable(OstrowskiError, ValueError):
    pass


class MissingGenerators(OstrowskiError, LookupError):
    pass


class UnsupportedLocalCase(OstrowskiError, NotImplementedError):
    """Raised when a local norm index is outside the shipped case table.

    ``places`` lists every offending prime so callers can report them all.
    """

    def __init__(self, message, places=()):
        super().__init__(message)
        self.places = tuple(places)


class InconsistentRanks(OstrowskiError, ValueError):
    pass


class NonIntegralOrder(OstrowskiError, ValueError):
    pass


class ParseError(OstrowskiError, ValueError):
    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class ValidationError(OstrowskiError, ValueError):
    def __init__(self, label, reason, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{label}{where}: {reason}")
        self.label = label
        self.reason = reason
        self.line = line
