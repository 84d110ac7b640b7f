"""Residue sets in Z/pZ as dense bitmasks, sumsets and Cauchy-Davenport checks.

A set is a Python int whose bit i marks residue i.  Cyclic shifts are two big
int shifts and a mask, so a sumset costs a handful of O(p/64) word passes per
*run* of consecutive residues in the smaller operand: each run ``[a, a+L)`` is
applied as a doubling smear by L followed by a rotation by a.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import BudgetExceeded, ModulusMismatch, RangeError

DEFAULT_PRIME_CAP = 2 ** 26

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_U64 = 2 ** 64


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_at_least(x) -> int:
    """Smallest prime >= ceil(x) (x rational, x >= 2)."""
    x = Fraction(x)
    if x < 2:
        raise RangeError(f"bound must be >= 2, got {x}")
    n = -((-x.numerator) // x.denominator)
    if n >= _U64:
        raise RangeError("prime search beyond the 64-bit range")
    while not is_prime(n):
        n += 1
        if n >= _U64:
            raise RangeError("prime search beyond the 64-bit range")
    return n


class ResidueSet:
    """Immutable subset of Z/pZ for prime p."""

    __slots__ = ("p", "mask", "cardinality")

    def __init__(self, p: int, mask: int = 0, check_prime: bool = True):
        if check_prime and not is_prime(p):
            raise RangeError(f"modulus {p} is not prime")
        if mask < 0 or mask >> p:
            raise RangeError("mask has bits outside 0..p-1")
        self.p = p
        self.mask = mask
        self.cardinality = mask.bit_count()

    @classmethod
    def of(cls, p: int, members: Iterable[int]) -> "ResidueSet":
        mask = 0
        for x in members:
            mask |= 1 << (x % p)
        return cls(p, mask)

    @classmethod
    def full(cls, p: int) -> "ResidueSet":
        return cls(p, (1 << p) - 1)

    @classmethod
    def interval(cls, p: int, start: int, length: int) -> "ResidueSet":
        """The arithmetic progression start, start+1, ..., start+length-1 (mod p)."""
        length = min(length, p)
        return cls(p, _rot(((1 << length) - 1), start % p, p))

    def _derived(self, mask: int) -> "ResidueSet":
        return ResidueSet(self.p, mask, check_prime=False)

    def __len__(self) -> int:
        return self.cardinality

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, x: int) -> bool:
        return bool((self.mask >> (x % self.p)) & 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, ResidueSet) and self.p == other.p and self.mask == other.mask

    def __hash__(self) -> int:
        return hash((self.p, self.mask))

    def __repr__(self) -> str:
        if self.p <= 64:
            return f"ResidueSet(p={self.p}, {self.members().tolist()})"
        return f"ResidueSet(p={self.p}, size={self.cardinality})"

    def __and__(self, other: "ResidueSet") -> "ResidueSet":
        _same_modulus(self, other)
        return self._derived(self.mask & other.mask)

    def __or__(self, other: "ResidueSet") -> "ResidueSet":
        _same_modulus(self, other)
        return self._derived(self.mask | other.mask)

    def bits(self) -> np.ndarray:
        """Membership as a boolean array of length p."""
        nbytes = (self.p + 7) // 8
        raw = np.frombuffer(self.mask.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.p].astype(bool)

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.bits())

    def min(self) -> int:
        if not self.mask:
            raise ValueError("empty residue set")
        return (self.mask & -self.mask).bit_length() - 1

    def runs(self) -> List[Tuple[int, int]]:
        """Maximal runs [lo, hi] of consecutive residues in 0..p-1 (not wrapping)."""
        if not self.mask:
            return []
        if _run_count(self.mask) <= 64:
            return _runs_by_bits(self.mask)
        b = self.bits().astype(np.int8)
        edges = np.diff(np.concatenate(([0], b, [0])))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1) - 1
        return [(int(s), int(e)) for s, e in zip(starts, ends)]

    def negate(self) -> "ResidueSet":
        b = self.bits()
        out = np.zeros_like(b)
        out[(-np.arange(self.p)) % self.p] = b
        return _from_bits(self.p, out)

    def shift(self, a: int) -> "ResidueSet":
        return self._derived(_rot(self.mask, a % self.p, self.p))


def _from_bits(p: int, bits: np.ndarray) -> ResidueSet:
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    return ResidueSet(p, int.from_bytes(packed.tobytes(), "little"), check_prime=False)


def _same_modulus(x: ResidueSet, y: ResidueSet) -> None:
    if x.p != y.p:
        raise ModulusMismatch(f"moduli differ: {x.p} vs {y.p}")


def _rot(mask: int, a: int, p: int) -> int:
    if a == 0:
        return mask
    full = (1 << p) - 1
    return ((mask << a) & full) | (mask >> (p - a))


def _smear(mask: int, length: int, p: int) -> int:
    """mask + {0, 1, ..., length-1} (mod p) by doubling."""
    acc, covered = mask, 1
    full = (1 << p) - 1
    while covered < length and acc != full:
        step = min(covered, length - covered)
        acc |= _rot(acc, step, p)
        covered += step
    return acc


def _run_count(mask: int) -> int:
    # runs start where a set bit has an unset predecessor
    return (mask & ~(mask << 1)).bit_count()


def _runs_by_bits(mask: int) -> List[Tuple[int, int]]:
    starts = mask & ~(mask << 1)
    ends = mask & ~(mask >> 1)
    out = []
    while starts:
        s = (starts & -starts).bit_length() - 1
        e = (ends & -ends).bit_length() - 1
        out.append((s, e))
        starts &= starts - 1
        ends &= ends - 1
    return out


def sumset(x: ResidueSet, y: ResidueSet) -> ResidueSet:
    """{a + b mod p : a in x, b in y}."""
    _same_modulus(x, y)
    p = x.p
    if not x.mask or not y.mask:
        return x._derived(0)
    if _run_count(x.mask) > _run_count(y.mask):
        x, y = y, x
    full = (1 << p) - 1
    out = 0
    cache = {}
    for lo, hi in x.runs():
        length = hi - lo + 1
        sm = cache.get(length)
        if sm is None:
            sm = cache[length] = _smear(y.mask, length, p)
        out |= _rot(sm, lo, p)
        if out == full:
            break
    return x._derived(out)


def k_fold_sumset(x: ResidueSet, k: int) -> ResidueSet:
    return partial_sumsets(x, k)[-1]


def partial_sumsets(x: ResidueSet, k: int) -> List[ResidueSet]:
    """[x, 2x, ..., kx]; kept for witness peeling."""
    if k < 1:
        raise RangeError("k must be >= 1")
    if not x:
        raise ValueError("k-fold sumset of the empty set")
    out = [x]
    for _ in range(k - 1):
        out.append(sumset(out[-1], x))
    return out


def cd_lower_bound(size_x: int, size_y: int, p: int) -> int:
    if not (1 <= size_x <= p and 1 <= size_y <= p):
        raise RangeError("set sizes must lie in 1..p")
    return min(p, size_x + size_y - 1)


@dataclass
class CDReport:
    p: int
    mode: str
    pairs_checked: int
    violations: int
    tight_cases: int
    seed: Optional[int] = None
    first_violation: Optional[Tuple[List[int], List[int]]] = None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "mode": self.mode,
            "pairs_checked": self.pairs_checked,
            "violations": self.violations,
            "tight_cases": self.tight_cases,
            "seed": self.seed,
            "first_violation": self.first_violation,
        }


@dataclass(frozen=True)
class CDConfig:
    exhaustive_cap: int = 7
    samples: int = 100_000
    seed: int = 20240601
    max_pairs: int = 10 ** 6


def verify_cd_exhaustive(p: int, config: CDConfig = CDConfig(), sampled: Optional[bool] = None) -> CDReport:
    """Check Cauchy-Davenport on every nonempty pair (or on seeded random pairs)."""
    if not is_prime(p):
        raise RangeError(f"{p} is not prime")
    if sampled is None:
        sampled = p > config.exhaustive_cap
    top = (1 << p) - 1
    if sampled:
        rng = random.Random(config.seed)
        pairs = ((rng.randint(1, top), rng.randint(1, top)) for _ in range(config.samples))
        total = config.samples
    else:
        total = top * top
        if total > config.max_pairs:
            raise BudgetExceeded(f"{total} pairs exceed the exhaustive budget {config.max_pairs}")
        pairs = ((a, b) for a in range(1, top + 1) for b in range(1, top + 1))
    violations = tight = 0
    first = None
    for a, b in pairs:
        xa = ResidueSet(p, a, check_prime=False)
        xb = ResidueSet(p, b, check_prime=False)
        size = len(sumset(xa, xb))
        bound = cd_lower_bound(len(xa), len(xb), p)
        if size < bound:
            violations += 1
            if first is None:
                first = (xa.members().tolist(), xb.members().tolist())
        elif size == bound:
            tight += 1
    return CDReport(p, "sampled" if sampled else "exhaustive", total, violations, tight,
                    config.seed if sampled else None, first)
