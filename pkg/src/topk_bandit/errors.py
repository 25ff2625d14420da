"""Exception hierarchy shared by every module of the package."""


class BanditError(Exception):
    """Base class. ``round_index`` is filled in when raised inside an experiment loop."""

    round_index = None

    def __str__(self):
        msg = super().__str__()
        if self.round_index is not None:
            return f"round {self.round_index}: {msg}"
        return msg


class ConfigError(BanditError, ValueError):
    """Invalid configuration or argument (CLI exit code 1)."""


class DataError(ConfigError):
    """Dataset path missing or unreadable."""


class InvalidInputError(BanditError, ValueError):
    """Argument shape or domain violation at a model or policy boundary."""


class ParseError(BanditError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(ParseError):
    """Bad magic number or truncated binary file."""


class ConsistencyError(BanditError, ValueError):
    pass


class EncodingError(BanditError, KeyError):
    def __str__(self):
        return BanditError.__str__(self)


class NumericError(BanditError, ArithmeticError):
    pass


class DivergedTrainingError(NumericError):
    def __init__(self, epoch, loss):
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")
        self.epoch = epoch
        self.loss = loss


class IncompatibleTracesError(BanditError, ValueError):
    pass
