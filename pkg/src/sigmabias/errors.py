"""Exception hierarchy.

Every error carries a stable ``code`` and the CLI exit status it maps to.
"""


class SigmaBiasError(Exception):
    code = "E_GENERIC"
    exit_status = 1


class InputError(SigmaBiasError, ValueError):
    code = "E_INPUT"
    exit_status = 2


class ParseError(InputError):
    code = "E_PARSE"

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class DataError(InputError):
    code = "E_DATA"


class DimensionError(InputError):
    code = "E_DIMENSION"


class AggregationError(InputError):
    code = "E_AGGREGATION"


class InsufficientDataError(SigmaBiasError, ValueError):
    code = "E_INSUFFICIENT_DATA"
    exit_status = 3


class DegenerateInputError(SigmaBiasError, ValueError):
    code = "E_DEGENERATE"
    exit_status = 4
