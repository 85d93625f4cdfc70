"""Exception hierarchy shared by every module."""


class QuantoMCError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(QuantoMCError, ValueError):
    pass


class ConfigMismatchError(QuantoMCError, ValueError):
    """Model, market and simulation settings disagree (e.g. case tags)."""


class NumericalBlowupError(QuantoMCError, ArithmeticError):
    """A stepper produced a non-finite value.

    ``variant``, ``path`` and ``step`` are filled in by the engine when known.
    """

    def __init__(self, message, variant=None, path=None, step=None, process=None):
        super().__init__(message)
        self.variant = variant
        self.path = path
        self.step = step
        self.process = process

    def __str__(self):
        base = super().__str__()
        ctx = [f"{k}={v}" for k, v in (("variant", self.variant), ("process", self.process),
                                        ("path", self.path), ("step", self.step)) if v is not None]
        return f"{base} ({', '.join(ctx)})" if ctx else base


class DomainSaturationError(QuantoMCError, ValueError):
    """A correlation bump does not fit inside the correlation model's domain."""


class EmptySampleError(QuantoMCError, ValueError):
    pass


class MisalignedPairError(QuantoMCError, ValueError):
    pass


class DataError(QuantoMCError):
    """Problems with historical input data (exit code 3 at the CLI)."""


class ParseError(DataError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class EmptySeriesError(DataError, ValueError):
    pass


class DuplicateDateError(DataError, ValueError):
    def __init__(self, date):
        super().__init__(f"duplicate date {date}")
        self.date = date


class InsufficientDataError(DataError, ValueError):
    pass


class AlignmentError(DataError, ValueError):
    def __init__(self, unmatched):
        self.unmatched = sorted(unmatched)
        shown = ", ".join(str(d) for d in self.unmatched[:10])
        more = "" if len(self.unmatched) <= 10 else f" (+{len(self.unmatched) - 10} more)"
        super().__init__(f"series are not aligned; unmatched dates: {shown}{more}")


class MissingInstrumentError(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing instrument"


class DegenerateSeriesError(DataError, ValueError):
    pass


class ConfigError(QuantoMCError, ValueError):
    """Invalid run configuration; names the offending field."""

    def __init__(self, field, reason):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason
