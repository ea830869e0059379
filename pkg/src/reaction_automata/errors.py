class ReactionAutomatonError(ValueError):
    """Base class for errors raised by this package."""


class MultisetError(ReactionAutomatonError):
    pass


class ModelError(ReactionAutomatonError):
    pass


class ConstructionError(ReactionAutomatonError):
    pass


class SampleError(ReactionAutomatonError):
    pass


class ParseError(ReactionAutomatonError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class InputError(ReactionAutomatonError):
    """A word mentions a symbol outside the input alphabet, or no bound is available."""
