"""Exception hierarchy shared by the library and the CLI."""


class SyndromeError(Exception):
    """Base class for all errors raised by swsyndrome."""


class DegenerateEvidence(SyndromeError, ValueError):
    """An observation has zero probability under every hypothesis."""


class DecodingInconsistency(SyndromeError, RuntimeError):
    """A trellis metric vanished: no path is consistent with the evidence."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class UnsupportedConfiguration(SyndromeError, ValueError):
    """A decoder was asked to run outside the conditions it is valid for."""


class EnumerationBudgetExceeded(SyndromeError, ValueError):
    """The exhaustive oracle refuses instances larger than its budget."""


class ConfigError(SyndromeError, ValueError):
    """Malformed configuration or code-description file."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line
