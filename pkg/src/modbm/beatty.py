"""Beatty sequences floor(n*alpha) and the fractional-part membership test.

For alpha > 1 irrational, m = floor(n*alpha) for some n >= 1 exactly when
``{m/alpha}`` lies in the window ``(1 - 1/alpha, 1)``.  Everything here is
decided with certified arithmetic from :mod:`modbm.exactnum`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .errors import InternalProofCheckFailed, ParseError, RangeError
from .exactnum import AlgebraicReal, Ordering, floor_multiple


@dataclass(frozen=True)
class PolynomialIntCoeffs:
    """Integer polynomial, coefficients listed constant term first.

    By default the nonzero coefficients must be positive and the leading one
    nonzero, so f(a) >= 1 for every a >= 1.  ``strict=False`` admits any
    integer polynomial of degree >= 1.
    """

    coefficients: Tuple[int, ...]
    strict: bool = True

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 2:
            raise RangeError("polynomial must have degree >= 1")
        if self.strict and any(c < 0 for c in coeffs):
            raise RangeError(f"coefficients must be nonnegative, got {coeffs}")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, a: int) -> int:
        return eval_poly(self, a)

    def to_text(self) -> str:
        return "poly:" + ",".join(str(c) for c in self.coefficients)

    @classmethod
    def parse(cls, text: str, strict: bool = True) -> "PolynomialIntCoeffs":
        if not text.startswith("poly:"):
            raise ParseError("polynomial must start with 'poly:'", text, 0)
        body = text[5:]
        pos = 5
        coeffs = []
        for part in body.split(","):
            if not re.fullmatch(r"[+-]?\d+", part):
                raise ParseError("malformed coefficient", text, pos)
            coeffs.append(int(part))
            pos += len(part) + 1
        try:
            return cls(tuple(coeffs), strict=strict)
        except RangeError as exc:
            raise ParseError(str(exc), text, 5) from None


SQUARE = PolynomialIntCoeffs((0, 0, 1))
IDENTITY = PolynomialIntCoeffs((0, 1))


def eval_poly(f: PolynomialIntCoeffs, a: int) -> int:
    acc = 0
    for c in reversed(f.coefficients):
        acc = acc * a + c
    return acc


def _check_alpha(alpha: AlgebraicReal) -> None:
    alpha.require_irrational()
    if alpha.compare(1) != Ordering.GREATER:
        raise RangeError(f"{alpha.to_text()} must exceed 1")


def beatty_term(alpha: AlgebraicReal, n: int) -> int:
    _check_alpha(alpha)
    return floor_multiple(alpha, n)


def beatty_prefix(alpha: AlgebraicReal, count: int) -> List[int]:
    """The first ``count`` terms floor(alpha), floor(2 alpha), ..."""
    _check_alpha(alpha)
    return [(alpha * n).floor() for n in range(1, count + 1)]


def beatty_upto(alpha: AlgebraicReal, bound: int) -> List[int]:
    """All terms <= bound, by direct enumeration of floor(n*alpha)."""
    _check_alpha(alpha)
    out = []
    n = 1
    while True:
        t = (alpha * n).floor()
        if t > bound:
            return out
        out.append(t)
        n += 1


class BeattyWindow:
    """Precomputed ``1/alpha`` and ``1 - 1/alpha`` for repeated membership tests."""

    def __init__(self, alpha: AlgebraicReal):
        _check_alpha(alpha)
        self.alpha = alpha
        self.rho = alpha.reciprocal()
        self.lower = 1 - self.rho

    def frac_above_lower(self, t: AlgebraicReal) -> bool:
        return t.compare(self.lower) == Ordering.GREATER

    def contains(self, m: int) -> bool:
        if m < 0:
            raise RangeError(f"m must be >= 0, got {m}")
        if m == 0:
            return False
        y = self.rho * m
        return self.frac_above_lower(y - y.floor())

    def contains_by_floor(self, m: int) -> bool:
        """Integer-route check: the only candidate index is n = floor(m/alpha) + 1."""
        if m <= 0:
            return False
        n = (self.rho * m).floor() + 1
        return (self.alpha * n).floor() == m


def beatty_contains(alpha: AlgebraicReal, m: int) -> bool:
    """Whether m = floor(n*alpha) for some n >= 1, via {m/alpha} > 1 - 1/alpha."""
    return BeattyWindow(alpha).contains(m)


def fractional_sum_in_window(window: BeattyWindow, fracs: Sequence[AlgebraicReal]) -> bool:
    """Whether ``sum(fracs) mod 1`` lies in (1 - 1/alpha, 1)."""
    total = sum(fracs[1:], fracs[0])
    return window.frac_above_lower(total - total.floor())


def ksum_fractional_form(alpha: AlgebraicReal, f: PolynomialIntCoeffs, a: Sequence[int]) -> bool:
    window = BeattyWindow(alpha)
    fracs = []
    for x in a:
        y = window.rho * eval_poly(f, x)
        fracs.append(y - y.floor())
    return fractional_sum_in_window(window, fracs)


def ksum_hits_beatty(alpha: AlgebraicReal, f: PolynomialIntCoeffs, k: int, a: Sequence[int]) -> bool:
    """Whether f(a_1) + ... + f(a_k) is a Beatty term.

    Decided twice: by the integer-route floor check on the sum and by the
    window test on the summed fractional parts ``{f(a_i)/alpha}``; the two
    must agree.
    """
    if k < 2:
        raise RangeError("k must be >= 2")
    if len(a) != k:
        raise RangeError(f"expected {k} elements, got {len(a)}")
    if any(x < 1 for x in a):
        raise RangeError("elements must be positive integers")
    window = BeattyWindow(alpha)
    total = sum(eval_poly(f, x) for x in a)
    direct = window.contains_by_floor(total)
    fractional = ksum_fractional_form(alpha, f, a)
    if direct != fractional:
        raise InternalProofCheckFailed(
            f"membership of {total} disagrees: floor route {direct}, window route {fractional}")
    return direct
