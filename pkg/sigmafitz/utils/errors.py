class FitzError(Exception):
    """Base class of every error raised by sigmafitz."""


class ExpressionSyntaxError(FitzError, ValueError):
    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        detail = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at position {position}{detail}")


class EvalError(FitzError, ArithmeticError):
    pass


class DimensionMismatch(FitzError, ValueError):
    pass


class MissingKey(FitzError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing key"


class NegativeSigma(FitzError, ValueError):
    pass


class NotInDomain(FitzError, ValueError):
    pass


class EmptyGraph(FitzError, ValueError):
    pass


class UnsupportedKind(FitzError, ValueError):
    pass


class NotAnExtension(FitzError, ValueError):
    pass


class NotInGraph(FitzError, ValueError):
    pass


class NotSigmaMonotone(FitzError, ValueError):
    pass


class NoSolutionInRange(FitzError, ValueError):
    def __init__(self, message, scan_minimum=None, scan_argmin=None):
        self.scan_minimum = scan_minimum
        self.scan_argmin = scan_argmin
        super().__init__(message)


class NowhereFinite(FitzError, ValueError):
    pass


class DocumentError(FitzError, ValueError):
    pass


class UsageError(FitzError, ValueError):
    pass


class NonFiniteValue(FitzError, ValueError):
    pass


class InvalidGrid(FitzError, ValueError):
    pass


class ConfigError(FitzError, ValueError):
    pass
