"""Exception hierarchy shared across the package."""


class RealCircError(Exception):
    """Base class for all errors raised by realcirc."""


class ParseError(RealCircError, ValueError):
    """A formula or file could not be parsed.

    ``offset`` is 0-based; ``line`` and ``column`` are 1-based.
    """

    def __init__(self, message: str, offset: int = 0, line: int = 1, column: int = 1):
        self.offset = offset
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{message} at line {line}, column {column}")


class FormulaSyntaxError(ParseError):
    pass


class UndeclaredSymbolError(ParseError):
    pass


class ArityError(ParseError):
    pass


class WellFormednessError(RealCircError, ValueError):
    """An AST violates the signature (unknown symbol, wrong arity, wrong kind)."""


class UnboundVariableError(RealCircError, KeyError):
    def __str__(self) -> str:
        return f"unbound variable {self.args[0]!r}"


class StructureError(RealCircError, ValueError):
    pass


class NoSolutionError(StructureError):
    """No universe size produces the requested encoding length."""


# The oracle reports the same condition under its own name.
NoUniverseSizeError = NoSolutionError


class LengthMismatchError(StructureError):
    pass


class RangeViolationError(StructureError):
    pass


class InvalidCircuitError(RealCircError, ValueError):
    def __init__(self, message: str, violations=()):
        self.violations = list(violations)
        super().__init__(message)


class UnknownGateError(RealCircError, KeyError):
    pass


class NotTreeLikeError(InvalidCircuitError):
    pass


class NotLeveledError(InvalidCircuitError):
    pass


class TooManyGatesError(RealCircError, ValueError):
    pass


class CompileError(RealCircError, ValueError):
    pass


class FreeVariableError(CompileError):
    pass


class MissingArbTableError(CompileError):
    pass


class ShadowingError(CompileError):
    pass
