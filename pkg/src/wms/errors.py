"""Exception hierarchy shared by every module.

Each class carries a stable ``code`` string so callers (and the CLI) can
map failures to exit statuses without matching on message text.
"""

from __future__ import annotations


class WmsError(Exception):
    code = "error"


class InputError(WmsError):
    """Malformed or out-of-contract input."""

    code = "input-error"


class InvalidArgument(InputError):
    code = "invalid-argument"


class ImproperIdeal(InputError):
    code = "improper-ideal"


class NoWideExtension(WmsError):
    code = "no-wide-extension"


class FormulaSyntaxError(InputError):
    code = "syntax-error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownRelation(InputError):
    code = "unknown-relation"


class ArityMismatch(InputError):
    code = "arity-mismatch"


class UnboundVariable(InputError):
    code = "unbound-variable"


class LiteralOutOfRange(InputError):
    code = "literal-out-of-range"


class ShapeMismatch(InputError):
    code = "shape-mismatch"


class ContextMismatch(InputError):
    code = "context-mismatch"


class DegenerateUniverse(InputError):
    code = "degenerate-universe"


class BudgetExceeded(WmsError):
    """A configured size or search budget was hit; the answer is unknown."""

    code = "budget-exceeded"


class CapExceeded(BudgetExceeded):
    code = "cap-exceeded"


class OrbitTooLarge(BudgetExceeded):
    code = "orbit-too-large"


class SearchBudgetExceeded(BudgetExceeded):
    code = "search-budget-exceeded"
