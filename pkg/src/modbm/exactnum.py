"""Exact rationals, quadratic irrationals and certified decimal enclosures.

Rationals are plain :class:`fractions.Fraction` values.  Irrational constants
come in two flavours:

* :class:`Quadratic` -- ``(e + f*sqrt(d)) / g`` with integer data.  Every
  comparison with a rational reduces to the sign of ``P + Q*sqrt(d)``, which
  is decided exactly with integer arithmetic.
* :class:`CertifiedDecimal` -- a real known only through rational enclosures
  whose width shrinks with the requested number of digits.  Decisions refine
  by doubling digits up to a budget and raise :class:`UndecidableAtPrecision`
  when the budget runs out.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

from .errors import NotIrrational, ParseError, RangeError, UndecidableAtPrecision

Rational = Fraction
RationalLike = Union[int, Fraction]

DEFAULT_BUDGET = 200
_MIN_START_DIGITS = 8

Enclosure = Optional[Tuple[Fraction, Fraction]]


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def as_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def format_rational(q: Fraction) -> str:
    """Always ``num/den``, even for integers, so reports have one shape."""
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    m = re.fullmatch(r"\s*([+-]?\d+)(?:/(\d+))?\s*", text)
    if not m:
        pos = _first_bad_position(text, r"[+-]?\d*(/\d*)?")
        raise ParseError("malformed rational", text, pos)
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError("zero denominator", text, text.index("/") + 1)
    return Fraction(int(m.group(1)), den)


def _first_bad_position(text: str, prefix_pattern: str) -> int:
    m = re.match(prefix_pattern, text)
    return m.end() if m else 0


def sign_surd(p: int, q: int, d: int) -> int:
    """Exact sign of ``p + q*sqrt(d)`` for integer p, q and d >= 0."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0 or d == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    lhs, rhs = p * p, q * q * d
    if lhs > rhs:
        return sp
    if lhs < rhs:
        return sq
    return 0


def floor_surd(p: int, q: int, d: int, g: int) -> int:
    """``floor((p + q*sqrt(d)) / g)`` for g > 0 and d not a perfect square.

    ``q*sqrt(d)`` lies strictly between consecutive integers M and M+1, and no
    multiple of g falls strictly inside (M, M+1), so the floor is ``M // g``.
    """
    if q == 0:
        return p // g
    root = math.isqrt(q * q * d)
    if q > 0:
        return (p + root) // g
    return (p - root - 1) // g


def _square_split(d: int) -> Tuple[int, int]:
    """Pull small square factors out of d; returns (s, core) with d = s*s*core."""
    s = 1
    k = 2
    while k * k <= d and k < 1000:
        kk = k * k
        while d % kk == 0:
            d //= kk
            s *= k
        k += 1
    return s, d


class AlgebraicReal:
    """Common surface of the irrational-constant flavours."""

    kind: str = "abstract"

    # subclasses provide: compare, floor, enclosure, arithmetic

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    def require_irrational(self) -> "AlgebraicReal":
        if self.is_rational:
            raise NotIrrational(f"{self.to_text()} is rational")
        return self

    def frac_cmp_of_multiple(self, v: int):
        """Return ``(floor(v*x), cmp)`` where ``cmp(q)`` is the sign of ``{v*x} - q``."""
        y = self * v
        fl = y.floor()
        t = y - fl
        return fl, lambda q: int(t.compare(q))

    def __float__(self) -> float:
        lo, hi = self._some_enclosure(20)
        return float((lo + hi) / 2)

    def _some_enclosure(self, digits: int) -> Tuple[Fraction, Fraction]:
        enc = self.enclosure(digits)
        if enc is None:
            raise UndecidableAtPrecision(f"no enclosure for {self.to_text()} at {digits} digits")
        return enc


@dataclass(frozen=True)
class Quadratic(AlgebraicReal):
    """The real number ``(e + f*sqrt(d)) / g``.

    Canonical form: g > 0, gcd(e, f, g) = 1, small square factors pulled out
    of d, and rationals (f == 0 or d a perfect square) stored with f = 0, d = 1.
    """

    e: int
    f: int
    d: int
    g: int = 1

    def __post_init__(self):
        e, f, d, g = self.e, self.f, self.d, self.g
        if g == 0:
            raise ZeroDivisionError("quadratic with zero denominator")
        if d < 0:
            raise RangeError("negative radicand")
        if f != 0 and d > 0:
            r = math.isqrt(d)
            if r * r == d:
                e, f, d = e + f * r, 0, 1
            else:
                s, d = _square_split(d)
                f *= s
        if f == 0 or d == 0:
            f, d = 0, 1
        if g < 0:
            e, f, g = -e, -f, -g
        c = math.gcd(math.gcd(e, f), g)
        if c > 1:
            e, f, g = e // c, f // c, g // c
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "g", g)

    @classmethod
    def sqrt(cls, d: int) -> "Quadratic":
        return cls(0, 1, d, 1)

    @classmethod
    def of_rational(cls, q: RationalLike) -> "Quadratic":
        q = as_rational(q)
        return cls(q.numerator, 0, 1, q.denominator)

    @property
    def kind(self) -> str:
        return "rational" if self.f == 0 else "quadratic"

    def as_fraction(self) -> Fraction:
        if self.f != 0:
            raise ValueError(f"{self.to_text()} is irrational")
        return Fraction(self.e, self.g)

    def to_text(self) -> str:
        if self.f == 0:
            return "rat:" + format_rational(Fraction(self.e, self.g))
        return f"quad:{self.e},{self.f},{self.d},{self.g}"

    def __repr__(self) -> str:
        return f"Quadratic({self.to_text()})"

    # ---- exact decisions -------------------------------------------------

    def sign(self) -> int:
        return sign_surd(self.e, self.f, self.d)

    def compare(self, y) -> Ordering:
        if isinstance(y, Quadratic):
            return Ordering((self - y).sign())
        if isinstance(y, AlgebraicReal):
            return Ordering(-int(y.compare_quadratic(self)))
        q = as_rational(y)
        a, b = q.numerator, q.denominator
        return Ordering(sign_surd(self.e * b - a * self.g, self.f * b, self.d))

    def floor(self) -> int:
        return floor_surd(self.e, self.f, self.d, self.g)

    def frac_cmp_of_multiple(self, v: int):
        e, f, d, g = self.e * v, self.f * v, self.d, self.g
        fl = floor_surd(e, f, d, g)
        base = e - g * fl

        def cmp(q) -> int:
            if isinstance(q, Quadratic):
                if q.f and f and q.d != d:
                    raise ValueError(f"mixed radicands {d} and {q.d}")
                return sign_surd(base * q.g - q.e * g, f * q.g - q.f * g, d if f else q.d)
            a, b = q.numerator, q.denominator
            return sign_surd(b * base - a * g, b * f, d)

        return fl, cmp

    def enclosure(self, digits: int) -> Tuple[Fraction, Fraction]:
        scale = 10 ** digits
        lo = (self * scale).floor()
        if self.f == 0 and Fraction(self.e, self.g) * scale == lo:
            return Fraction(lo, scale), Fraction(lo, scale)
        return Fraction(lo, scale), Fraction(lo + 1, scale)

    # ---- arithmetic (closed over a single radicand) ------------------------

    def _coerce(self, other) -> "Quadratic":
        if isinstance(other, Quadratic):
            if self.f and other.f and self.d != other.d:
                raise ValueError(f"mixed radicands {self.d} and {other.d}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Quadratic.of_rational(other)
        return NotImplemented

    def _radicand(self, other: "Quadratic") -> int:
        return self.d if self.f else other.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Quadratic(self.e * o.g + o.e * self.g, self.f * o.g + o.f * self.g,
                         self._radicand(o), self.g * o.g)

    __radd__ = __add__

    def __neg__(self):
        return Quadratic(-self.e, -self.f, self.d, self.g)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._radicand(o)
        return Quadratic(self.e * o.e + self.f * o.f * d, self.e * o.f + o.e * self.f, d, self.g * o.g)

    __rmul__ = __mul__

    def reciprocal(self) -> "Quadratic":
        norm = self.e * self.e - self.f * self.f * self.d
        if norm == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return Quadratic(self.g * self.e, -self.g * self.f, self.d, norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other


def _interval_mul(a: Tuple[Fraction, Fraction], b: Tuple[Fraction, Fraction]):
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(prods), max(prods)


@dataclass(frozen=True, eq=False)
class CertifiedDecimal(AlgebraicReal):
    """A real number known through shrinking rational enclosures.

    ``approx(digits)`` returns ``(lo, hi)`` containing the true value, or None
    when nothing useful is known at that precision.  Literals parsed from text
    carry a fixed radius and never refine.
    """

    approx: Callable[[int], Enclosure]
    start_digits: int = _MIN_START_DIGITS
    budget: int = DEFAULT_BUDGET
    label: str = "dec:?"
    refinable: bool = True

    kind = "certified-decimal"

    @classmethod
    def from_literal(cls, text: str, radius: Optional[Fraction] = None,
                     budget: int = DEFAULT_BUDGET) -> "CertifiedDecimal":
        m = re.fullmatch(r"[+-]?(\d+)(?:\.(\d*))?", text)
        if not m:
            raise ParseError("malformed decimal literal", text, _first_bad_position(text, r"[+-]?\d*(\.\d*)?"))
        try:
            mid = Fraction(Decimal(text))
        except InvalidOperation as exc:  # pragma: no cover - regex already filters
            raise ParseError("malformed decimal literal", text, 0) from exc
        places = len(m.group(2) or "")
        if radius is None:
            radius = Fraction(1, 10 ** places)
        if radius <= 0:
            raise RangeError("certified radius must be positive")
        enc = (mid - radius, mid + radius)
        return cls(lambda _digits: enc, start_digits=max(places, 1), budget=budget,
                   label=f"dec:{text}", refinable=False)

    @classmethod
    def from_function(cls, fn: Callable[[int], Fraction], budget: int = DEFAULT_BUDGET,
                      label: str = "dec:<fn>") -> "CertifiedDecimal":
        """``fn(D)`` must return a rational within 10**-D of the true value."""

        def approx(digits: int) -> Enclosure:
            c = fn(digits)
            rad = Fraction(1, 10 ** digits)
            return c - rad, c + rad

        return cls(approx, budget=budget, label=label)

    def to_text(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"CertifiedDecimal({self.label})"

    def enclosure(self, digits: int) -> Enclosure:
        return self.approx(digits)

    def _schedule(self):
        d = max(self.start_digits, 1)
        while True:
            yield min(d, self.budget)
            if d >= self.budget or not self.refinable:
                return
            d *= 2

    def _decide(self, test, what: str):
        for digits in self._schedule():
            enc = self.approx(digits)
            if enc is None:
                continue
            verdict = test(*enc)
            if verdict is not None:
                return verdict
        raise UndecidableAtPrecision(f"cannot decide {what} for {self.label} within {self.budget} digits")

    # ---- certified decisions ---------------------------------------------

    def compare(self, y) -> Ordering:
        if isinstance(y, AlgebraicReal):
            return Ordering((self - y).compare(0))
        q = as_rational(y)

        def test(lo, hi):
            if hi < q:
                return Ordering.LESS
            if lo > q:
                return Ordering.GREATER
            return None

        return self._decide(test, f"comparison with {q}")

    def compare_quadratic(self, y: Quadratic) -> Ordering:
        return (self - _lift(y, self)).compare(0)

    def floor(self) -> int:
        def test(lo, hi):
            a, b = math.floor(lo), math.floor(hi)
            return a if a == b else None

        return self._decide(test, "floor")

    # ---- arithmetic builds new enclosure functions -------------------------

    def _derive(self, fn, label: str) -> "CertifiedDecimal":
        return CertifiedDecimal(fn, start_digits=self.start_digits, budget=self.budget,
                                label=label, refinable=self.refinable)

    def _binary(self, other, op, sym: str):
        if isinstance(other, AlgebraicReal):
            o = _lift(other, self)
            refinable = self.refinable and o.refinable

            def fn(digits):
                a, b = self.approx(digits), o.approx(digits)
                if a is None or b is None:
                    return None
                return op(a, b)

            return CertifiedDecimal(fn, start_digits=max(self.start_digits, o.start_digits),
                                    budget=min(self.budget, o.budget),
                                    label=f"({self.label}{sym}{o.label})", refinable=refinable)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            return self._binary(_exact_certified(q, self.budget), op, sym)
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, lambda a, b: (a[0] + b[0], a[1] + b[1]), "+")

    __radd__ = __add__

    def __neg__(self):
        return self._derive(lambda digits: _neg_enc(self.approx(digits)), f"-{self.label}")

    def __sub__(self, other):
        return self._binary(other, lambda a, b: (a[0] - b[1], a[1] - b[0]), "-")

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binary(other, _interval_mul, "*")

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedDecimal":
        def fn(digits):
            enc = self.approx(digits)
            if enc is None or enc[0] <= 0 <= enc[1]:
                return None
            return 1 / enc[1], 1 / enc[0]

        return self._derive(fn, f"1/{self.label}")

    def __truediv__(self, other):
        if isinstance(other, AlgebraicReal):
            return self * _lift(other, self).reciprocal()
        return self * (1 / as_rational(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other


def _neg_enc(enc: Enclosure) -> Enclosure:
    if enc is None:
        return None
    return -enc[1], -enc[0]


def _exact_certified(q: Fraction, budget: int) -> CertifiedDecimal:
    return CertifiedDecimal(lambda _digits: (q, q), budget=budget,
                            label=format_rational(q), refinable=True)


def _lift(x: AlgebraicReal, like: CertifiedDecimal) -> CertifiedDecimal:
    if isinstance(x, CertifiedDecimal):
        return x
    return CertifiedDecimal(x.enclosure, start_digits=like.start_digits,
                            budget=like.budget, label=x.to_text())


# ---- module-level operations ----------------------------------------------

def compare(x: AlgebraicReal, y: RationalLike) -> Ordering:
    """Ordering of x relative to the rational y (exact for quadratics)."""
    return x.compare(y)


def floor_multiple(x: AlgebraicReal, n: int) -> int:
    """``floor(n*x)`` for positive x and n >= 1."""
    if n < 1:
        raise RangeError(f"multiplier must be >= 1, got {n}")
    if x.compare(0) != Ordering.GREATER:
        raise RangeError(f"{x.to_text()} is not positive")
    return (x * n).floor()


def frac_of_quotient(m: int, x: AlgebraicReal) -> Tuple[int, AlgebraicReal]:
    """Split ``m/x`` into integer part and fractional part ``{m/x}``."""
    if m < 0:
        raise RangeError(f"numerator must be >= 0, got {m}")
    x.require_irrational()
    if x.compare(1) != Ordering.GREATER:
        raise RangeError(f"{x.to_text()} must exceed 1")
    y = x.reciprocal() * m
    whole = y.floor()
    return whole, y - whole


def parse_constant(text: str, budget: int = DEFAULT_BUDGET) -> AlgebraicReal:
    """Parse ``rat:n/d``, ``quad:e,f,d,g`` or ``dec:digits``."""
    tag, sep, body = text.partition(":")
    if not sep:
        raise ParseError("missing constant tag (rat:, quad:, dec:)", text, 0)
    offset = len(tag) + 1
    if tag == "rat":
        try:
            return Quadratic.of_rational(parse_rational(body))
        except ParseError as exc:
            raise ParseError("malformed rational", text, offset + (exc.position or 0)) from None
    if tag == "quad":
        parts = body.split(",")
        if len(parts) != 4:
            raise ParseError(f"quad needs 4 integers e,f,d,g, got {len(parts)}", text, offset)
        vals = []
        pos = offset
        for i, part in enumerate(parts):
            pat = r"[+-]?\d+" if i < 2 else r"\d+"
            if not re.fullmatch(pat, part):
                raise ParseError("malformed integer", text, pos + _first_bad_position(part, pat))
            vals.append(int(part))
            pos += len(part) + 1
        e, f, d, g = vals
        if g == 0:
            raise ParseError("zero denominator g", text, pos - len(parts[3]) - 1)
        if d == 0:
            raise ParseError("radicand must be positive", text, offset + len(parts[0]) + len(parts[1]) + 2)
        return Quadratic(e, f, d, g)
    if tag == "dec":
        try:
            return CertifiedDecimal.from_literal(body, budget=budget)
        except ParseError as exc:
            raise ParseError("malformed decimal literal", text, offset + (exc.position or 0)) from None
    raise ParseError(f"unknown constant tag {tag!r}", text, 0)
