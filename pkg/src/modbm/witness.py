"""Constructive mod-1 Brunn-Minkowski: find a1..ak in A with a1+...+ak mod 1 in B.

Inputs are finite interval unions A, B in (0, 1) with B open and
``delta = k*mu(A) + mu(B) - 1 > 0``.  The pipeline shrinks B by r, lays the
grid of closed cells [(s-1)/p, s/p] over both sets, and moves the problem to
Z/pZ where Cauchy-Davenport forces the k-fold sumset of the A-grid points to
meet the B-grid points.  Every intermediate inequality is recorded in the
returned trace and re-checkable from scratch with :func:`verify_trace`.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .errors import (HypothesisViolated, InternalProofCheckFailed, NotOpen,
                     PrimeCapExceeded, RangeError)
from .exactnum import format_rational
from .torus import (IntervalUnion, cells_to_union, grid_cells_inside,
                    make, shrink)
from .zp import DEFAULT_PRIME_CAP, ResidueSet, is_prime, next_prime_at_least, partial_sumsets

FAITHFUL = "faithful"
TIGHT = "tight"

# above this p the verifier trusts grid_cells_inside instead of scanning every q
BRUTE_FORCE_GRID_LIMIT = 200_000


@dataclass(frozen=True)
class WitnessConfig:
    mode: str = FAITHFUL
    prime_cap: int = DEFAULT_PRIME_CAP

    def __post_init__(self):
        if self.mode not in (FAITHFUL, TIGHT):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class Check:
    name: str
    lhs: str
    relation: str
    rhs: str
    holds: bool
    required: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "relation": self.relation,
                "rhs": self.rhs, "holds": self.holds, "required": self.required}


@dataclass(frozen=True)
class WitnessTrace:
    k: int
    mode: str
    A: IntervalUnion
    B: IntervalUnion
    delta: Fraction
    n: int
    t: Fraction
    r: Fraction
    B1: IntervalUnion
    B2: IntervalUnion
    m: int
    A2: IntervalUnion
    prime_bound: Fraction
    p: int
    A3cells: IntervalUnion
    B3cells: IntervalUnion
    Atilde: ResidueSet
    Btilde: ResidueSet
    kfold_size: int
    target: int
    residue_witness: Tuple[int, ...]
    real_witness: Tuple[Fraction, ...]
    witness_sum: Fraction
    checks: Tuple[Check, ...] = field(default=())

    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if c.required and not c.holds]

    def to_dict(self) -> dict:
        q = format_rational
        return {
            "k": self.k,
            "mode": self.mode,
            "A": self.A.to_text(),
            "B": self.B.to_text(),
            "delta": q(self.delta),
            "n": self.n,
            "t": q(self.t),
            "r": q(self.r),
            "B1": self.B1.to_text(),
            "B2": self.B2.to_text(),
            "m": self.m,
            "A2": self.A2.to_text(),
            "prime_bound": q(self.prime_bound),
            "p": self.p,
            "A3cells": self.A3cells.to_text(),
            "B3cells": self.B3cells.to_text(),
            "Atilde": _residues_dict(self.Atilde),
            "Btilde": _residues_dict(self.Btilde),
            "kfold_size": self.kfold_size,
            "target": self.target,
            "residue_witness": list(self.residue_witness),
            "real_witness": [q(x) for x in self.real_witness],
            "witness_sum": q(self.witness_sum),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _residues_dict(s: ResidueSet) -> dict:
    return {"p": s.p, "size": len(s), "runs": [list(r) for r in s.runs()]}


# ---- pipeline stages -------------------------------------------------------

def _validate(A: IntervalUnion, B: IntervalUnion, k: int) -> Fraction:
    if k < 2:
        raise RangeError(f"k must be >= 2, got {k}")
    if A.is_empty or B.is_empty:
        raise HypothesisViolated("A and B must be nonempty")
    if not B.all_open:
        raise NotOpen(f"B must be open, got {B.to_text()}")
    if A.contains_rational(0) or any(iv.right == 1 and not iv.right_open for iv in A):
        raise RangeError(f"A must lie inside (0, 1), got {A.to_text()}")
    delta = k * A.measure + B.measure - 1
    if delta <= 0:
        raise HypothesisViolated(
            f"k*mu(A) + mu(B) - 1 = {delta} is not positive (k={k}, mu(A)={A.measure}, mu(B)={B.measure})")
    return delta


def _select_b1(B: IntervalUnion, delta: Fraction) -> IntervalUnion:
    # B is already a finite union, so keeping all of it leaves mu(B \ B1) = 0 < delta/4
    return B


def shrink_radius(B1: IntervalUnion, delta: Fraction) -> Tuple[Fraction, Fraction]:
    """(t, r) with t the shortest interval length and r = min(t/4, delta/(4n))."""
    t = min(iv.length for iv in B1)
    return t, min(t / 4, delta / (4 * len(B1)))


def prime_bound(B1: IntervalUnion, A2: IntervalUnion, r: Fraction, delta: Fraction, k: int) -> Fraction:
    """max{2/(b_i - a_i - 2r), 2/(d_j - c_j)} + 24(kmn + n)/delta."""
    n, m = len(B1), len(A2)
    terms = [2 / (iv.length - 2 * r) for iv in B1] + [2 / iv.length for iv in A2]
    return max(terms) + Fraction(24 * (k * m * n + n)) / delta


def grid_points(cells: ResidueSet) -> ResidueSet:
    """Residues q with q/p an endpoint of one of the given closed cells.

    Cell s covers [(s-1)/p, s/p], so its endpoints are s-1 and s; a run of j
    adjacent cells therefore yields j+1 points.
    """
    return cells | cells.shift(-1)


def _reverse_bits(s: ResidueSet) -> int:
    bits = s.bits()[::-1]
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def peel(atilde: ResidueSet, partials: List[ResidueSet], target: int) -> Tuple[int, ...]:
    """Write ``target`` as a sum of k elements of ``atilde`` modulo p.

    ``partials[j]`` is the (j+1)-fold sumset.  At each step the smallest
    q in atilde with target - q in the previous partial sumset is removed.
    """
    p = atilde.p
    full = (1 << p) - 1
    out = []
    b = target
    for j in range(len(partials) - 1, 0, -1):
        prev = partials[j - 1]
        # {b - s : s in prev} = reverse(prev) rotated by b + 1
        rev = _reverse_bits(prev)
        a = (b + 1) % p
        shifted = ((rev << a) & full) | (rev >> (p - a)) if a else rev
        cand = atilde.mask & shifted
        if not cand:
            raise InternalProofCheckFailed(f"peeling failed at step {j} for target {b}")
        q = (cand & -cand).bit_length() - 1
        out.append(q)
        b = (b - q) % p
    if b not in atilde:
        raise InternalProofCheckFailed(f"last residue {b} not in the A-grid")
    out.append(b)
    return tuple(out)


@dataclass
class _GridAttempt:
    p: int
    A3: ResidueSet
    B3: ResidueSet
    Atilde: ResidueSet
    Btilde: ResidueSet
    kfold: Optional[ResidueSet]
    target: Optional[int]
    residues: Optional[Tuple[int, ...]]


def _attempt(A2: IntervalUnion, B2: IntervalUnion, k: int, p: int) -> _GridAttempt:
    A3 = grid_cells_inside(A2, p)
    B3 = grid_cells_inside(B2, p)
    at, bt = grid_points(A3), grid_points(B3)
    if not at or not bt:
        return _GridAttempt(p, A3, B3, at, bt, None, None, None)
    partials = partial_sumsets(at, k)
    hit = partials[-1] & bt
    if not hit:
        return _GridAttempt(p, A3, B3, at, bt, partials[-1], None, None)
    target = hit.min()
    return _GridAttempt(p, A3, B3, at, bt, partials[-1], target, peel(at, partials, target))


def _primes_from(start: int):
    n = start
    while True:
        if is_prime(n):
            yield n
        n += 1


def find_witness(A: IntervalUnion, B: IntervalUnion, k: int,
                 config: WitnessConfig = WitnessConfig()) -> WitnessTrace:
    delta = _validate(A, B, k)
    B1 = _select_b1(B, delta)
    n = len(B1)
    t, r = shrink_radius(B1, delta)
    B2 = shrink(B1, r)
    A2 = A
    m = len(A2)
    bound = prime_bound(B1, A2, r, delta, k)
    cap = config.prime_cap

    if config.mode == FAITHFUL:
        if bound >= cap:
            raise PrimeCapExceeded(f"prime bound {float(bound):.6g} exceeds cap {cap}")
        p = next_prime_at_least(math.floor(bound) + 1)
        if p > cap:
            raise PrimeCapExceeded(f"prime {p} exceeds cap {cap}")
        att = _attempt(A2, B2, k, p)
        if att.residues is None:
            raise InternalProofCheckFailed(f"no residue witness at faithful prime p={p}")
    else:
        att = None
        for p in _primes_from(2):
            if p > cap:
                break
            cand = _attempt(A2, B2, k, p)
            if cand.residues is not None:
                att = cand
                break
        if att is None:
            raise PrimeCapExceeded(f"tight search found no witness below cap {cap}")

    p = att.p
    residues = att.residues
    real = tuple(Fraction(q, p) for q in residues)
    total = sum(real, Fraction(0))
    wsum = total - math.floor(total)
    A3cells = cells_to_union(att.A3)
    B3cells = cells_to_union(att.B3)
    trace = WitnessTrace(
        k=k, mode=config.mode, A=A, B=B, delta=delta, n=n, t=t, r=r, B1=B1, B2=B2,
        m=m, A2=A2, prime_bound=bound, p=p, A3cells=A3cells, B3cells=B3cells,
        Atilde=att.Atilde, Btilde=att.Btilde, kfold_size=len(att.kfold), target=att.target,
        residue_witness=residues, real_witness=real, witness_sum=wsum,
    )
    checks = evaluate_checks(trace)
    trace = replace(trace, checks=tuple(checks))
    failed = trace.failed_checks()
    if failed:
        raise InternalProofCheckFailed("trace check failed: " + ", ".join(c.name for c in failed))
    return trace


def _cmp(name, lhs, rel, rhs, required=True) -> Check:
    ops = {"<": lhs < rhs, "<=": lhs <= rhs, ">": lhs > rhs, ">=": lhs >= rhs, "==": lhs == rhs}
    fmt = lambda x: format_rational(x) if isinstance(x, Fraction) else str(x)
    return Check(name, fmt(lhs), rel, fmt(rhs), bool(ops[rel]), required)


def _member(name, what: str, ok: bool) -> Check:
    return Check(name, what, "in", name.split("_in_")[-1], ok, True)


def evaluate_checks(tr: WitnessTrace) -> List[Check]:
    """Evaluate every inequality of the construction on a trace.

    Checks that only hold because p exceeds the prime bound are marked
    not required in tight mode.
    """
    k, p, d = tr.k, tr.p, tr.delta
    faithful = tr.mode == FAITHFUL
    muA, muB = tr.A.measure, tr.B.measure
    muA2, muB2 = tr.A2.measure, tr.B2.measure
    muA3, muB3 = tr.A3cells.measure, tr.B3cells.measure
    sa, sb = len(tr.Atilde), len(tr.Btilde)
    n, m = tr.n, tr.m
    out = [
        _cmp("delta_positive", d, ">", Fraction(0)),
        _cmp("B_minus_B1_small", muB - tr.B1.measure, "<", d / 4),
        _cmp("shrink_radius", tr.r, "==", min(tr.t / 4, d / (4 * n))),
        _cmp("B2_measure", muB2, ">=", muB - 3 * d / 4),
        _cmp("A2_measure", muA2, ">", muA - d / (6 * n * k)),
        _cmp("p_exceeds_bound", Fraction(p), ">", tr.prime_bound, faithful),
        _cmp("A3_cell_loss", muA3, ">=", muA2 - Fraction(2 * m, p)),
        _cmp("B3_cell_loss", muB3, ">=", muB2 - Fraction(2 * n, p)),
        _cmp("grid_margin", Fraction(2 * m * k + 2 * n, p), "<", d / 12, faithful),
        _cmp("grid_loss", k * muA3 + muB3, ">", k * muA2 + muB2 - d / 12, faithful),
        _cmp("grid_measure_total", k * muA3 + muB3, ">=", Fraction(1), faithful),
        _cmp("Atilde_size", sa, ">=", 2 * m, faithful),
        _cmp("Btilde_size", sb, ">=", 2 * n, faithful),
        _cmp("residue_count", Fraction(k * (sa - m) + (sb - n), p), ">=", Fraction(1), faithful),
        _cmp("residue_margin", k * sa - k, ">=", p - sb + 1, faithful),
        _cmp("cauchy_davenport", tr.kfold_size, ">=", min(p, k * sa - k + 1)),
        _cmp("kfold_covers", tr.kfold_size, ">=", p - sb + 2, faithful),
        _member("residue_sum_in_Btilde", str(sum(tr.residue_witness) % p),
                sum(tr.residue_witness) % p in tr.Btilde),
        _member("witness_in_A", ",".join(format_rational(x) for x in tr.real_witness),
                all(tr.A.contains_rational(x) for x in tr.real_witness)),
        _member("sum_in_B3", format_rational(tr.witness_sum), tr.B3cells.contains_rational(tr.witness_sum)),
        _member("sum_in_B2", format_rational(tr.witness_sum), tr.B2.contains_rational(tr.witness_sum)),
        _member("sum_in_B", format_rational(tr.witness_sum), tr.B.contains_rational(tr.witness_sum)),
    ]
    return out


# ---- independent re-check ------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    ok: bool
    failure: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _brute_grid_points(S: IntervalUnion, p: int) -> ResidueSet:
    """Residues q (0 <= q <= p) with q/p an endpoint of a closed cell inside S."""
    inside = [False] * (p + 2)
    for s in range(1, p + 1):
        lo, hi = Fraction(s - 1, p), Fraction(s, p)
        inside[s] = any(iv.contains_closed(lo, hi) for iv in S)
    pts = [q for q in range(p + 1) if inside[q] or inside[q + 1]]
    return ResidueSet.of(p, pts)


def verify_trace(tr: WitnessTrace, A: IntervalUnion, B: IntervalUnion, k: int) -> Verdict:
    """Recompute the construction from A, B, k and compare against the trace."""
    def fail(msg):
        return Verdict(False, msg)

    if tr.k != k:
        return fail("k mismatch")
    if tr.A != A or tr.B != B:
        return fail("inputs mismatch")
    if not is_prime(tr.p):
        return fail("p not prime")
    if len(tr.residue_witness) != k or len(tr.real_witness) != k:
        return fail("witness length not k")
    if not all(A.contains_rational(x) for x in tr.real_witness):
        return fail("witness element not in A")
    total = sum(tr.real_witness, Fraction(0))
    wsum = total - math.floor(total)
    if not B.contains_rational(wsum):
        return fail("sum not in B")
    if wsum != tr.witness_sum:
        return fail("recorded sum mismatch")
    if tuple(Fraction(q, tr.p) for q in tr.residue_witness) != tuple(tr.real_witness):
        return fail("real witness does not match residues")

    delta = k * A.measure + B.measure - 1
    if delta <= 0:
        return fail("delta not positive")
    if delta != tr.delta:
        return fail("delta mismatch")
    if tr.B1 != B or tr.n != len(B):
        return fail("B1 mismatch")
    t, r = shrink_radius(B, delta)
    if (t, r) != (tr.t, tr.r):
        return fail("t or r mismatch")
    B2 = shrink(B, r)
    if B2 != tr.B2:
        return fail("B2 mismatch")
    if tr.A2 != A or tr.m != len(A):
        return fail("A2 mismatch")
    bound = prime_bound(B, A, r, delta, k)
    if bound != tr.prime_bound:
        return fail("prime bound mismatch")
    if tr.mode == FAITHFUL and not tr.p > bound:
        return fail("p does not exceed bound")

    p = tr.p
    if p <= BRUTE_FORCE_GRID_LIMIT:
        at, bt = _brute_grid_points(A, p), _brute_grid_points(B2, p)
    else:
        at, bt = grid_points(grid_cells_inside(A, p)), grid_points(grid_cells_inside(B2, p))
    if at != tr.Atilde:
        return fail("Atilde mismatch")
    if bt != tr.Btilde:
        return fail("Btilde mismatch")
    if any(q not in at for q in tr.residue_witness):
        return fail("residue not in Atilde")
    if sum(tr.residue_witness) % p not in bt:
        return fail("residue sum not in Btilde")
    if not tr.B3cells.contains_rational(wsum):
        return fail("sum not in B3")

    for c in evaluate_checks(tr):
        if c.required and not c.holds:
            return fail(f"check {c.name} fails")
    return Verdict(True)


# ---- sharpness of the measure hypothesis -------------------------------------

@dataclass
class SharpnessReport:
    beta: Fraction
    k: int
    grid: int
    points: int
    tuples_checked: int
    enumeration: str
    max_sum: Fraction
    all_sums_below_beta: bool
    hits_in_B: int
    boundary_rejected: bool
    boundary_message: str

    def to_dict(self) -> dict:
        return {
            "beta": format_rational(self.beta),
            "k": self.k,
            "grid": self.grid,
            "A": make([(0, self.beta / self.k)]).to_text(),
            "B": make([(self.beta, 1)]).to_text(),
            "points": self.points,
            "tuples_checked": self.tuples_checked,
            "enumeration": self.enumeration,
            "max_sum": format_rational(self.max_sum),
            "all_sums_below_beta": self.all_sums_below_beta,
            "hits_in_B": self.hits_in_B,
            "boundary_rejected": self.boundary_rejected,
            "boundary_message": self.boundary_message,
        }


def sharpness_scan(beta: Fraction, k: int, grid: int, budget: int = 10 ** 6,
                   seed: int = 20240601) -> SharpnessReport:
    """Sums of k points of A = (0, beta/k) never reach B = (beta, 1).

    Points are ``(beta/k) * i / grid`` for i = 1..grid-1.  All multisets are
    checked when they fit in ``budget``, otherwise ``budget`` seeded samples.
    """
    beta = Fraction(beta)
    if not (0 < beta < 1):
        raise RangeError("beta must lie in (0, 1)")
    if grid < 10:
        raise RangeError("grid must be >= 10")
    if k < 2:
        raise RangeError("k must be >= 2")
    A = make([(0, beta / k)])
    B = make([(beta, 1)])
    pts = [beta / k * Fraction(i, grid) for i in range(1, grid)]
    total = math.comb(len(pts) + k - 1, k)
    if total <= budget:
        tuples = itertools.combinations_with_replacement(pts, k)
        mode, count = "exhaustive", total
    else:
        rng = random.Random(seed)
        tuples = (tuple(rng.choice(pts) for _ in range(k)) for _ in range(budget))
        mode, count = "sampled", budget
    best = Fraction(0)
    below = True
    hits = 0
    for tup in tuples:
        s = sum(tup, Fraction(0))
        best = max(best, s)
        if not (0 < s < beta):
            below = False
        if B.contains_rational(s - math.floor(s)):
            hits += 1
    try:
        find_witness(A, B, k)
        rejected, msg = False, "boundary instance was not rejected"
    except HypothesisViolated as exc:
        rejected, msg = True, f"HypothesisViolated: {exc}"
    return SharpnessReport(beta, k, grid, len(pts), count, mode, best, below, hits, rejected, msg)


# ---- random instances ------------------------------------------------------

def _random_union(rng: random.Random, pieces: int, denominator: int) -> IntervalUnion:
    """Up to ``pieces`` open intervals in (0, 1) with endpoints on the 1/denominator grid."""
    cuts = sorted(rng.sample(range(1, denominator), 2 * pieces))
    return make([(Fraction(cuts[i], denominator), Fraction(cuts[i + 1], denominator))
                 for i in range(0, len(cuts), 2)])


def random_instance(rng: random.Random, ks: Tuple[int, ...] = (2, 3, 4), max_pieces: int = 3,
                    denominators: Tuple[int, ...] = (12, 30, 60, 120, 360),
                    max_bound: Fraction = Fraction(DEFAULT_PRIME_CAP)) -> Tuple[IntervalUnion, IntervalUnion, int]:
    """Draw (A, B, k) with delta > 0 and faithful prime bound below ``max_bound``."""
    while True:
        k = rng.choice(ks)
        den = rng.choice(denominators)
        A = _random_union(rng, rng.randint(1, max_pieces), den)
        B = _random_union(rng, rng.randint(1, max_pieces), den)
        delta = k * A.measure + B.measure - 1
        if delta <= 0:
            continue
        t, r = shrink_radius(B, delta)
        if prime_bound(B, A, r, delta, k) < max_bound:
            return A, B, k
