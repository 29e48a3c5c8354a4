"""Exception types shared across the package."""


class CoulterError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(CoulterError, ValueError):
    pass


class EvenPrime(CoulterError, ValueError):
    pass


class DegreeZero(CoulterError, ValueError):
    pass


class CtxMismatch(CoulterError, ValueError):
    """Operands belong to different fields."""


class DivisionByZero(CoulterError, ZeroDivisionError):
    pass


class CycOverflow(CoulterError, OverflowError):
    """A cyclotomic coefficient left the configured magnitude bound."""


class PrimeMismatch(CoulterError, ValueError):
    pass


class ZeroCoefficient(CoulterError, ValueError):
    pass


class ZeroB(CoulterError, ValueError):
    pass


class EvenEOverD(CoulterError, ValueError):
    """The closed form needs e/gcd(alpha, e) odd."""

    def __init__(self, e: int, alpha: int):
        from math import gcd

        d = gcd(alpha, e)
        super().__init__(
            f"closed forms require e/gcd(alpha,e) odd; got e={e}, alpha={alpha}, e/d={e // d}"
        )
        self.e = e
        self.alpha = alpha


class NotPermutation(CoulterError, ValueError):
    pass


class IsPermutation(CoulterError, ValueError):
    pass


class EnumerationCeiling(CoulterError, ValueError):
    """The field is too large to enumerate under the current ceiling."""
