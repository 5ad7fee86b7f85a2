"""Exception hierarchy shared by every layer of the engine."""


class AcelError(Exception):
    """Base class for all engine errors."""


class EvaluationError(AcelError):
    """A query or automaton could not be evaluated on the given data."""


class UnboundAttribute(EvaluationError):
    """An expression read an attribute that the event does not carry."""

    def __init__(self, name):
        super().__init__(f"unbound attribute {name!r}")
        self.name = name


class RenamingError(EvaluationError):
    """An event is not consistent with a renaming."""


class ParseError(AcelError):
    def __init__(self, message, line=None, column=None):
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.column = column


class StreamError(AcelError):
    """A stream or schema file is malformed or violates its schema."""

    def __init__(self, message, index=None):
        where = f"event {index}: " if index is not None else ""
        super().__init__(where + message)
        self.index = index


class UnsupportedFeature(AcelError):
    """The selected engine cannot handle a construct of the query."""


class ExtensionWarning(UserWarning):
    """A compiled automaton leaves the pure-renaming automaton fragment."""
