"""Exact arithmetic on real quadratic irrationals (a + b*sqrt(d)) / c.

All operations use integer arithmetic only; comparisons are sign-exact.
Rationals are carried in the same representation with b == 0, so values
can be compared against convergents without a second number type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import (
    NegativeRadicand,
    ParseError,
    PeriodNotFound,
    RationalInput,
    ZeroDenominator,
)

__all__ = ["QuadraticSurd", "CFExpansion", "parse_surd_literal"]

_CF_TERM_BUDGET = 4096


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _squarefree_decompose(d: int) -> tuple[int, int]:
    """Return (s, r) with d == s*s*r and r squarefree (d >= 1)."""
    s, r = 1, 1
    n = d
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                r *= f
        f += 1 if f == 2 else 2
    return s, r * n


def _sign_lin(a: int, b: int, d: int) -> int:
    """Sign of a + b*sqrt(d) for integer a, b and squarefree d >= 0."""
    if b == 0 or d == 0:
        return _sign(a)
    if a == 0:
        return _sign(b)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs, rhs = a * a, b * b * d
    if lhs == rhs:
        return 0
    return _sign(a) if lhs > rhs else _sign(b)


def _sign_two_radicals(a: int, b: int, p: int, c: int, q: int) -> int:
    """Sign of a + b*sqrt(p) + c*sqrt(q), p and q squarefree."""
    if b == 0 or p == 0:
        return _sign_lin(a, c, q)
    if c == 0 or q == 0:
        return _sign_lin(a, b, p)
    if p == q:
        return _sign_lin(a, b + c, p)
    # Compare L = a + b*sqrt(p) against R = -c*sqrt(q) by sign, then square.
    s_left = _sign_lin(a, b, p)
    s_right = -_sign(c)
    if s_left != s_right:
        return 1 if s_left > s_right else -1
    if s_left == 0:
        return 0
    t = _sign_lin(a * a + b * b * p - c * c * q, 2 * a * b, p)
    return t if s_left > 0 else -t


@dataclass(frozen=True)
class CFExpansion:
    """Eventually periodic continued fraction: preperiod then repeating block."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def coefficient(self, k: int) -> int:
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]


class QuadraticSurd:
    """Normalized value (a + b*sqrt(d)) / c with c > 0 and gcd(a, b, c) == 1.

    Perfect-square radicands are folded into the rational part, so b == 0
    exactly when the value is rational; d is kept squarefree otherwise.
    Instances are immutable and hashable; equal values compare equal.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int = 1, d: int = 0):
        if c == 0:
            raise ZeroDenominator("denominator c must be nonzero")
        if d < 0:
            raise NegativeRadicand(f"radicand must be nonnegative, got {d}")
        if b == 0 or d == 0:
            b, d = 0, 0
        else:
            s, r = _squarefree_decompose(d)
            if r == 1:
                a += b * s
                b, d = 0, 0
            else:
                b, d = b * s, r
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(abs(a), abs(b)), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("QuadraticSurd is immutable")

    @classmethod
    def from_fraction(cls, f: Fraction | int) -> "QuadraticSurd":
        f = Fraction(f)
        return cls(f.numerator, 0, f.denominator, 0)

    @classmethod
    def sqrt(cls, d: int) -> "QuadraticSurd":
        return cls(0, 1, 1, d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise RationalInput("value is irrational")
        return Fraction(self.a, self.c)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "QuadraticSurd":
        return QuadraticSurd(-self.a, -self.b, self.c, self.d)

    def _add_fraction(self, f: Fraction) -> "QuadraticSurd":
        return QuadraticSurd(
            self.a * f.denominator + f.numerator * self.c,
            self.b * f.denominator,
            self.c * f.denominator,
            self.d,
        )

    def __add__(self, other) -> "QuadraticSurd":
        if isinstance(other, (int, Fraction)):
            return self._add_fraction(Fraction(other))
        if isinstance(other, QuadraticSurd) and (
            other.b == 0 or self.b == 0 or other.d == self.d
        ):
            d = self.d if self.b else other.d
            return QuadraticSurd(
                self.a * other.c + other.a * self.c,
                self.b * other.c + other.b * self.c,
                self.c * other.c,
                d,
            )
        return NotImplemented

    def __sub__(self, other) -> "QuadraticSurd":
        if isinstance(other, (int, Fraction)):
            return self._add_fraction(-Fraction(other))
        return self.__add__(-other)

    def scale(self, f: Fraction | int) -> "QuadraticSurd":
        """Multiply by an exact rational."""
        f = Fraction(f)
        return QuadraticSurd(
            self.a * f.numerator,
            self.b * f.numerator,
            self.c * f.denominator,
            self.d,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def square(self) -> "QuadraticSurd":
        a, b, c, d = self.a, self.b, self.c, self.d
        return QuadraticSurd(a * a + b * b * d, 2 * a * b, c * c, d)

    def reciprocal(self) -> "QuadraticSurd":
        a, b, c, d = self.a, self.b, self.c, self.d
        norm = a * a - b * b * d
        if norm == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return QuadraticSurd(a * c, -b * c, norm, d)

    # -- comparison ---------------------------------------------------------

    def sign(self) -> int:
        return _sign_lin(self.a, self.b, self.d)

    def compare(self, other) -> int:
        """Exact three-way comparison (-1, 0, +1) against a surd or rational."""
        if isinstance(other, (int, Fraction)):
            other = QuadraticSurd.from_fraction(other)
        a = self.a * other.c - other.a * self.c
        return _sign_two_radicals(a, self.b * other.c, self.d, -other.b * self.c, other.d)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QuadraticSurd.from_fraction(other)
        if not isinstance(other, QuadraticSurd):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    # -- floor / fractional part --------------------------------------------

    def floor_scaled(self, digits: int = 0) -> int:
        """floor(value * 10**digits), exact.

        Uses integer square roots; exactness relies on sqrt(b*b*d) never
        being an integer when b != 0 (d is squarefree >= 2 after init).
        """
        t = 10 ** digits
        num = self.a * t
        if self.b > 0:
            num += isqrt(self.b * self.b * self.d * t * t)
        elif self.b < 0:
            num -= isqrt(self.b * self.b * self.d * t * t) + 1
        return num // self.c

    def floor(self) -> int:
        return self.floor_scaled(0)

    def frac(self) -> "QuadraticSurd":
        """Fractional part, normalized, in [0, 1)."""
        m = self.floor()
        return QuadraticSurd(self.a - m * self.c, self.b, self.c, self.d)

    def __float__(self) -> float:
        return self.floor_scaled(17) / 10 ** 17

    # -- continued fraction --------------------------------------------------

    def cf_expansion(self, max_terms: int = _CF_TERM_BUDGET) -> CFExpansion:
        """Eventually periodic CF via the integer (P, Q) iteration.

        The radicand is constant along the iteration, so states (P, Q) are
        in bijection with tail values; the first repeated state closes the
        minimal period.
        """
        if self.b == 0:
            raise RationalInput("rational values have finite, aperiodic expansions")
        big_d = self.b * self.b * self.d
        if self.b > 0:
            p, q = self.a, self.c
        else:
            p, q = -self.a, -self.c
        if (big_d - p * p) % q:
            t = abs(q)
            p, q, big_d = p * t, q * t, big_d * t * t
        root = isqrt(big_d)
        seen: dict[tuple[int, int], int] = {}
        coeffs: list[int] = []
        while len(coeffs) <= max_terms:
            state = (p, q)
            if state in seen:
                start = seen[state]
                return CFExpansion(tuple(coeffs[:start]), tuple(coeffs[start:]))
            seen[state] = len(coeffs)
            if q > 0:
                ak = (p + root) // q
            else:
                ak = (-p - root - 1) // (-q)
            coeffs.append(ak)
            p = ak * q - p
            q = (big_d - p * p) // q
        raise PeriodNotFound(max_terms)

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadraticSurd({self.a}/{self.c})"
        return f"QuadraticSurd(({self.a}+{self.b}*sqrt({self.d}))/{self.c})"

    def __str__(self) -> str:
        if self.b == 0:
            return f"({self.a}+0*sqrt(0))/{self.c}"
        return f"({self.a}+{self.b}*sqrt({self.d}))/{self.c}"


_SQRT_RE = re.compile(r"^sqrt\((\d+)\)$")
_FULL_RE = re.compile(
    r"^\(([+-]?\d+)([+-])(\d+)\*sqrt\((\d+)\)\)/([+-]?\d+)$"
)


def parse_surd_literal(text: str) -> QuadraticSurd:
    """Parse `(a+b*sqrt(D))/c` or the shorthand `sqrt(D)`; whitespace ignored."""
    compact = re.sub(r"\s+", "", text)
    m = _SQRT_RE.match(compact)
    if m:
        return QuadraticSurd(0, 1, 1, int(m.group(1)))
    m = _FULL_RE.match(compact)
    if m:
        a, sign_b, b, d, c = m.groups()
        b_val = int(b) if sign_b == "+" else -int(b)
        if int(c) == 0:
            raise ParseError("denominator must be nonzero", text)
        return QuadraticSurd(int(a), b_val, int(c), int(d))
    raise ParseError("expected `(a+b*sqrt(D))/c` or `sqrt(D)`", text)
