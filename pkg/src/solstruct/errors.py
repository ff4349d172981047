"""Exception types shared across modules."""


class SolstructError(Exception):
    """Base class for all package errors."""


class UndefinedNameError(SolstructError):
    """A statement references a variable that has no prior definition."""

    def __init__(self, line: int, name: str):
        super().__init__(f"line {line}: undefined name '{name}'")
        self.line = line
        self.name = name
