"""Exception hierarchy shared across the package."""


class BinmfError(Exception):
    """Base class for all package errors."""


class ShapeError(BinmfError, ValueError):
    pass


class BoundsError(BinmfError, IndexError):
    pass


class DomainError(BinmfError, ValueError):
    """A value lies outside its allowed domain (negative entry, alpha > 1, ...)."""


class NumericError(BinmfError, ArithmeticError):
    pass


class ConfigError(BinmfError, ValueError):
    pass


class FormatError(BinmfError, ValueError):
    """A file does not match its declared format."""


class ParseError(FormatError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
