"""Exception types shared across the package."""


class KronpermError(Exception):
    """Base class for all library errors."""


class ZeroDenominator(KronpermError, ValueError):
    pass


class NegativeRadicand(KronpermError, ValueError):
    pass


class RationalInput(KronpermError, ValueError):
    pass


class RationalAlpha(KronpermError, ValueError):
    """Exact permutation builders need an irrational alpha (ties otherwise)."""


class PeriodNotFound(KronpermError, RuntimeError):
    """The CF period did not close within the term budget."""

    def __init__(self, max_terms: int):
        super().__init__(f"no period found within {max_terms} terms")
        self.max_terms = max_terms


class StreamExhausted(KronpermError, LookupError):
    pass


class IdentityViolation(KronpermError, RuntimeError):
    """|p_n q_{n-1} - p_{n-1} q_n| != 1; signals a convergent bug."""


class PrecisionBudgetExceeded(KronpermError, RuntimeError):
    pass


class NotCoprime(KronpermError, ValueError):
    pass


class SizeLimit(KronpermError, ValueError):
    pass


class NotPalindromic(KronpermError, ValueError):
    pass


class OddIndex(KronpermError, ValueError):
    pass


class WrongBranch(KronpermError, ValueError):
    pass


class StructureViolation(KronpermError, RuntimeError):
    """A mechanically checked structure claim failed on a concrete case."""


class ParseError(KronpermError, ValueError):
    """Bad literal or alpha specification; carries the offending text."""

    def __init__(self, message: str, text: str, position: int = 0):
        super().__init__(f"{message}: {text!r} (at offset {position})")
        self.text = text
        self.position = position
