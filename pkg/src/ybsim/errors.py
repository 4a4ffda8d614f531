"""Exception types shared across the package.

The CLI maps each class onto a fixed exit code, so new failure modes should
subclass one of these rather than raising bare ``ValueError``.
"""


class YbsimError(Exception):
    """Base class for all package errors."""


class InputError(YbsimError, ValueError):
    """Malformed input: bad dimensions, wires, files or parse errors."""


class ConstraintError(InputError):
    """A solution-family parameter constraint does not hold.

    ``condition`` names the violated condition (e.g. ``"p-modulus"``).
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class OracleCapError(YbsimError):
    """Dense computation requested beyond the oracle size cap."""


class PropertyGError(YbsimError):
    """Q fails property (G) for the gate set's permutation group."""


class GateMismatchError(YbsimError):
    """Gate kind does not fit the requested algorithm (e.g. mixed Q)."""


class BraidParseError(InputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
