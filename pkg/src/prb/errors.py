"""Exception hierarchy shared by the engine and the command-line front end."""


class PrbError(Exception):
    """Base class for all errors raised by :mod:`prb`."""

    exit_code = 1
    kind = "error"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class DomainError(PrbError, ValueError):
    """An argument lies outside the domain of the operation."""

    kind = "domain_error"


class PreconditionError(PrbError, ValueError):
    """A mathematical precondition of an algorithm does not hold."""

    kind = "precondition_error"


class PrecisionError(PrbError, ArithmeticError):
    """Interval arithmetic could not decide a comparison within the precision cap."""

    kind = "precision_error"


class InternalError(PrbError, RuntimeError):
    """A consistency check failed; this indicates a bug."""

    kind = "internal_error"


class ParseError(PrbError, ValueError):
    """Malformed input text. Carries a 1-based line and column."""

    exit_code = 2
    kind = "parse_error"

    def __init__(self, message, line=1, column=1, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"line {line}, column {column}"
        if source:
            where = f"{source}: {where}"
        super().__init__(f"{where}: {message}")

    def to_json(self):
        out = {"error": self.kind, "message": self.message,
               "line": self.line, "column": self.column}
        if self.source:
            out["source"] = self.source
        return out
