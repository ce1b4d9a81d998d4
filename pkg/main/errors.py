from typing import Any, Optional

from main.constants.exit_codes import EXIT_PROPERTY_FAILURE, EXIT_SIZE_GUARD, EXIT_USAGE


class WorkbenchError(Exception):
    """Base class; every error carries the CLI exit code it maps to"""
    exit_code = EXIT_USAGE


# Usage and input errors

class ParseError(WorkbenchError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SignatureError(WorkbenchError):
    pass


class MissingLetterError(WorkbenchError):
    pass


class FormatError(WorkbenchError):
    """Malformed JSON input; path is a JSON path such as ``$.rel[2]``"""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class KindMismatch(WorkbenchError):
    pass


class KindError(WorkbenchError):
    pass


class UsageError(WorkbenchError):
    pass


# Property failures

class WitnessError(WorkbenchError):
    exit_code = EXIT_PROPERTY_FAILURE

    def __init__(self, condition: str, witness: Any = None):
        detail = f" (witness {witness})" if witness is not None else ""
        super().__init__(f"{condition}{detail}")
        self.condition = condition
        self.witness = witness


class CycleError(WitnessError):
    pass


class FrameConditionError(WitnessError):
    pass


class AlgebraConditionError(WitnessError):
    pass


class ValuationError(WitnessError):
    pass


class CoherenceError(WitnessError):
    """Two computations that must agree did not"""


class SizeGuard(WorkbenchError):
    exit_code = EXIT_SIZE_GUARD

    def __init__(self, what: str, required: int, cap: int, partial: Optional[Any] = None):
        super().__init__(f"{what}: requires {required}, cap is {cap}")
        self.what = what
        self.required = required
        self.cap = cap
        self.partial = partial


def guard(what: str, required: int, cap: int) -> None:
    if required > cap:
        raise SizeGuard(what, required, cap)
