"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to, so the command line never
needs its own lookup table.
"""


class ModbmError(Exception):
    exit_code = 1


class ParseError(ModbmError, ValueError):
    exit_code = 2

    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if text is not None and position is not None:
            message = f"{message} at position {position} in {text!r}"
        super().__init__(message)


# precondition violations (exit 1)
class NotIrrational(ModbmError):
    pass


class RangeError(ModbmError, ValueError):
    pass


class OverlapError(ModbmError, ValueError):
    pass


class ModulusMismatch(ModbmError, ValueError):
    pass


class HypothesisViolated(ModbmError):
    pass


class NotOpen(ModbmError):
    pass


class InternalProofCheckFailed(ModbmError, AssertionError):
    pass


# precision / budget failures (exit 3)
class UndecidableAtPrecision(ModbmError, ArithmeticError):
    exit_code = 3


class BudgetExceeded(ModbmError):
    exit_code = 3


class PrimeCapExceeded(BudgetExceeded):
    pass
