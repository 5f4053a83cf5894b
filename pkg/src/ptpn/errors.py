class PTPNError(Exception):
    """Base class for every error raised by this package."""


class NetError(PTPNError):
    pass


class EmptyIntervalError(NetError):
    pass


class NotEnabledError(NetError):
    pass


class UnknownTransitionError(NetError):
    pass


class ParseError(PTPNError):
    """A diagnostic pointing at a line (and column) of the input text."""

    kind = "SyntaxError"

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self._format())

    def _format(self):
        where = ""
        if self.source:
            where += f"{self.source}:"
        if self.line is not None:
            where += f"{self.line}:"
            if self.column is not None:
                where += f"{self.column}:"
        if where:
            where += " "
        return f"{where}{self.kind}: {self.message}"


class NetSyntaxError(ParseError):
    kind = "SyntaxError"


class DuplicateNameError(ParseError):
    kind = "DuplicateName"


class UnknownReferenceError(ParseError):
    kind = "UnknownReference"


class EmptyIntervalParseError(ParseError):
    kind = "EmptyInterval"


class NegativeTokensError(ParseError):
    kind = "NegativeTokens"


class MissingComponentError(ParseError):
    kind = "MissingComponent"


class ProductError(PTPNError):
    pass


class NotFirableError(PTPNError):
    pass


class PartialGraphError(PTPNError):
    pass


class UnsupportedIntervalsError(PTPNError):
    pass
