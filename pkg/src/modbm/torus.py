"""Finite unions of intervals in [0, 1) with exact rational endpoints.

Openness is tracked per endpoint: shrinking an open set and then asking which
closed grid cells ``[(s-1)/p, s/p]`` fit inside it is where all of the
boundary loss in the witness construction comes from.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .errors import OverlapError, ParseError, RangeError
from .exactnum import AlgebraicReal, RationalLike, as_rational, format_rational, parse_rational
from .zp import ResidueSet


@dataclass(frozen=True, order=True)
class Interval:
    left: Fraction
    right: Fraction
    left_open: bool = True
    right_open: bool = True

    def __post_init__(self):
        object.__setattr__(self, "left", as_rational(self.left))
        object.__setattr__(self, "right", as_rational(self.right))
        if not (0 <= self.left < self.right <= 1):
            raise RangeError(f"interval endpoints must satisfy 0 <= l < r <= 1, got {self.left}, {self.right}")

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def contains_rational(self, x: Fraction) -> bool:
        if x < self.left or (x == self.left and self.left_open):
            return False
        return x < self.right or (x == self.right and not self.right_open)

    def contains_closed(self, lo: Fraction, hi: Fraction) -> bool:
        """True when the closed interval [lo, hi] lies inside this interval."""
        return self.contains_rational(lo) and self.contains_rational(hi)

    def to_text(self) -> str:
        lb = "(" if self.left_open else "["
        rb = ")" if self.right_open else "]"
        return f"{lb}{_fmt_endpoint(self.left)}..{_fmt_endpoint(self.right)}{rb}"


def _fmt_endpoint(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class IntervalUnion:
    """Sorted, pairwise disjoint, canonically merged intervals inside [0, 1]."""

    __slots__ = ("intervals", "measure")

    def __init__(self, intervals: Iterable[Interval] = ()):
        items = sorted(intervals, key=lambda iv: (iv.left, iv.left_open))
        merged: List[Interval] = []
        for iv in items:
            if merged:
                prev = merged[-1]
                if iv.left < prev.right:
                    raise OverlapError(f"{prev.to_text()} overlaps {iv.to_text()}")
                if iv.left == prev.right and not (prev.right_open and iv.left_open):
                    # touching with at least one closed side: merge into one
                    merged[-1] = Interval(prev.left, iv.right, prev.left_open, iv.right_open)
                    continue
            merged.append(iv)
        self.intervals: Tuple[Interval, ...] = tuple(merged)
        self.measure: Fraction = sum((iv.length for iv in merged), Fraction(0))

    def __repr__(self):
        return f"IntervalUnion({self.to_text()!r})"

    def __eq__(self, other):
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def all_open(self) -> bool:
        return all(iv.left_open and iv.right_open for iv in self.intervals)

    def to_text(self) -> str:
        return ",".join(iv.to_text() for iv in self.intervals)

    def contains_rational(self, x: RationalLike) -> bool:
        x = as_rational(x)
        return any(iv.contains_rational(x) for iv in self.intervals)

    def contains_point(self, x: AlgebraicReal) -> bool:
        return contains_point(self, x)


def make(intervals: Sequence[tuple]) -> IntervalUnion:
    """Build a union from ``(left, right)`` or ``(left, right, left_open, right_open)``.

    A bare pair is open on both sides.
    """
    out = []
    for item in intervals:
        if len(item) == 2:
            out.append(Interval(item[0], item[1]))
        elif len(item) == 4:
            out.append(Interval(*item))
        else:
            raise ValueError(f"bad interval item {item!r}")
    return IntervalUnion(out)


EMPTY = IntervalUnion()
TORUS = make([(0, 1, False, True)])


def measure(s: IntervalUnion) -> Fraction:
    return s.measure


def shrink(s: IntervalUnion, r: RationalLike) -> IntervalUnion:
    """Replace each (a, b) by (a+r, b-r); drop intervals with b - a <= 2r."""
    r = as_rational(r)
    if r < 0:
        raise RangeError("shrink radius must be nonnegative")
    if r == 0:
        return s
    kept = [Interval(iv.left + r, iv.right - r, iv.left_open, iv.right_open)
            for iv in s.intervals if iv.length > 2 * r]
    return IntervalUnion(kept)


def _cell_range(iv: Interval, p: int) -> Tuple[int, int]:
    """Inclusive range of s with [(s-1)/p, s/p] inside iv (may be empty)."""
    lp = iv.left * p
    rp = iv.right * p
    # need (s-1) >= l*p (closed) or (s-1) > l*p (open)
    lo_num = lp.numerator // lp.denominator
    if lp.denominator == 1:
        s_min = lo_num + (2 if iv.left_open else 1)
    else:
        s_min = lo_num + 2
    # need s <= r*p (closed) or s < r*p (open)
    hi_num = rp.numerator // rp.denominator
    if rp.denominator == 1 and iv.right_open:
        s_max = hi_num - 1
    else:
        s_max = hi_num
    return max(s_min, 1), min(s_max, p)


def grid_cells_inside(s: IntervalUnion, p: int) -> ResidueSet:
    """Residues ``s mod p`` of the closed cells ``[(s-1)/p, s/p]`` lying in the union.

    Cell s = p is labelled by residue 0.  The point 1 is identified with 0, so
    the last cell counts as inside when ``[(p-1)/p, 1)`` is covered and 0 is a
    member (as for the full torus ``[0..1)``).
    """
    if p < 2:
        raise RangeError("grid size must be at least 2")
    mask = 0
    zero_in = s.contains_rational(Fraction(0))
    for iv in s.intervals:
        lo, hi = _cell_range(iv, p)
        if iv.right == 1 and iv.right_open and zero_in and lo <= p:
            hi = p
        if lo > hi:
            continue
        # cell s -> bit (s mod p)
        if hi == p:
            mask |= 1
            hi -= 1
        if lo <= hi:
            mask |= ((1 << (hi - lo + 1)) - 1) << lo
    return ResidueSet(p, mask)


def cells_to_union(cells: ResidueSet) -> IntervalUnion:
    """Union of the closed cells labelled by ``cells`` (inverse of grid_cells_inside)."""
    p = cells.p
    out = []
    for lo, hi in cells.runs():
        # residue s labels cell s (s = p for residue 0)
        if lo == 0:
            out.append(Interval(Fraction(p - 1, p), Fraction(1), False, False))
            if hi == 0:
                continue
            lo = 1
        out.append(Interval(Fraction(lo - 1, p), Fraction(hi, p), False, False))
    return IntervalUnion(out)


def contains_point(s: IntervalUnion, x: AlgebraicReal) -> bool:
    """Certified membership of x in the union."""
    return _locate(s, lambda q: int(x.compare(q)))


def contains_frac_of_multiple(s: IntervalUnion, x: AlgebraicReal, v: int) -> bool:
    """Whether ``{v*x}`` lies in the union (integer fast path for quadratics)."""
    _, cmp = x.frac_cmp_of_multiple(v)
    return _locate(s, cmp)


def _locate(s: IntervalUnion, cmp) -> bool:
    for iv in s.intervals:
        c = cmp(iv.left)
        if c < 0 or (c == 0 and iv.left_open):
            return False
        c = cmp(iv.right)
        if c < 0 or (c == 0 and not iv.right_open):
            return True
    return False


_INTERVAL_RE = re.compile(r"\s*([\[(])\s*([^.\s\])]+)\s*\.\.\s*([^\s\])]+)\s*([\])])\s*")


def parse_union(text: str) -> IntervalUnion:
    """Parse ``(l..r),[l..r)`` style unions; the empty string gives the empty set."""
    if not text.strip():
        return EMPTY
    pos = 0
    out = []
    while True:
        m = _INTERVAL_RE.match(text, pos)
        if not m:
            raise ParseError("expected interval like (0..1/2)", text, pos)
        left_b, ltxt, rtxt, right_b = m.groups()
        try:
            left = parse_rational(ltxt)
        except ParseError:
            raise ParseError("bad left endpoint", text, m.start(2)) from None
        try:
            right = parse_rational(rtxt)
        except ParseError:
            raise ParseError("bad right endpoint", text, m.start(3)) from None
        out.append(Interval(left, right, left_b == "(", right_b == ")"))
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != ",":
            raise ParseError("expected ',' between intervals", text, pos)
        pos += 1
    return IntervalUnion(out)


def format_union(s: IntervalUnion) -> str:
    return s.to_text()


__all__ = [
    "Interval", "IntervalUnion", "make", "measure", "shrink", "grid_cells_inside",
    "cells_to_union", "contains_point", "contains_frac_of_multiple", "parse_union",
    "format_union", "EMPTY", "TORUS", "format_rational",
]
