"""Finite-scale density experiments around the optimal threshold 1/k - 1/(k alpha).

* fractional-part sets {n <= N : {f(n)/alpha} in J} and their densities
  (equidistribution: the density tends to mu(J));
* the avoidance set whose fractional parts sit in (0, (1 - 1/alpha)/k), which
  has density 1/k - 1/(k alpha) and whose k-fold f-sums miss the Beatty
  sequence;
* hit scans for sets above the threshold, counting k-fold f-sums that land in
  the Beatty sequence.
"""
from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .beatty import BeattyWindow, PolynomialIntCoeffs, eval_poly
from .errors import (BudgetExceeded, HypothesisViolated, InternalProofCheckFailed,
                     RangeError, UndecidableAtPrecision)
from .exactnum import AlgebraicReal, Ordering, Quadratic, format_rational
from .torus import IntervalUnion, _locate

DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class ScanConfig:
    seed: int = DEFAULT_SEED
    sample_budget: int = 200_000
    spot_checks: int = 10_000
    first_hits: int = 5
    count_tuples: bool = False


def _checkpoints(N: int) -> List[int]:
    out = []
    c = 10
    while c < N:
        out.append(c)
        c *= 10
    out.append(N)
    return out


def _scan(rho: AlgebraicReal, f: PolynomialIntCoeffs, N: int, inside) -> Tuple[List[int], Dict[int, int]]:
    """n <= N whose {rho*f(n)} satisfies ``inside(cmp)``; also counts at decades."""
    if N < 1:
        raise RangeError("N must be >= 1")
    members = []
    marks = set(_checkpoints(N))
    counts = {}
    for n in range(1, N + 1):
        v = eval_poly(f, n)
        try:
            _, cmp = rho.frac_cmp_of_multiple(v)
            hit = inside(cmp)
        except UndecidableAtPrecision as exc:
            raise UndecidableAtPrecision(f"n={n}: {exc}") from None
        if hit:
            members.append(n)
        if n in marks:
            counts[n] = len(members)
    return members, counts


def _in_union(J: IntervalUnion):
    return lambda cmp: _locate(J, cmp)


def fractional_membership_set(alpha: AlgebraicReal, f: PolynomialIntCoeffs,
                              J: IntervalUnion, N: int) -> List[int]:
    """{n <= N : {f(n)/alpha} in J}."""
    alpha.require_irrational()
    return _scan(alpha.reciprocal(), f, N, _in_union(J))[0]


@dataclass
class WeylReport:
    rho: str
    f: str
    J: str
    mu_J: Fraction
    N: int
    count: int
    estimate: Fraction
    deviation: Fraction
    trend: List[Tuple[int, int]]

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "f": self.f,
            "J": self.J,
            "mu_J": format_rational(self.mu_J),
            "N": self.N,
            "count": self.count,
            "estimate": format_rational(self.estimate),
            "estimate_float": float(self.estimate),
            "deviation": float(self.deviation),
            "trend": [{"N": n, "count": c, "estimate": c / n,
                       "deviation": abs(c / n - float(self.mu_J))} for n, c in self.trend],
        }


def weyl_density_estimate(rho: AlgebraicReal, f: PolynomialIntCoeffs,
                          J: IntervalUnion, N: int) -> WeylReport:
    """|{n <= N : {rho f(n)} in J}| / N and its distance from mu(J)."""
    rho.require_irrational()
    members, counts = _scan(rho, f, N, _in_union(J))
    est = Fraction(len(members), N)
    return WeylReport(rho.to_text(), f.to_text(), J.to_text(), J.measure, N, len(members),
                      est, abs(est - J.measure), sorted(counts.items()))


# ---- hit scans ------------------------------------------------------------------

@dataclass
class HitScanReport:
    N: int
    k: int
    f: str
    alpha: str
    set_size: int
    density_estimate: Fraction
    target_density: float
    hit_count: int
    tuples_examined: int
    enumeration: str
    first_hits: List[Tuple[int, ...]]
    criterion_disagreements: int
    milestones: List[Tuple[int, int]]
    extra: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "N": self.N,
            "k": self.k,
            "f": self.f,
            "alpha": self.alpha,
            "set_size": self.set_size,
            "density_estimate": format_rational(self.density_estimate),
            "density_estimate_float": float(self.density_estimate),
            "target_density": self.target_density,
            "hit_count": self.hit_count,
            "tuples_examined": self.tuples_examined,
            "enumeration": self.enumeration,
            "first_hits": [list(t) for t in self.first_hits],
            "criterion_disagreements": self.criterion_disagreements,
            "milestones": [{"n": n, "set_size": c} for n, c in self.milestones],
        }
        d.update(self.extra)
        return d

    def csv_row(self) -> dict:
        return {"N": self.N, "set_size": self.set_size,
                "density_estimate": float(self.density_estimate),
                "target_density": self.target_density, "hit_count": self.hit_count}


CSV_COLUMNS = ["N", "set_size", "density_estimate", "target_density", "hit_count"]


def reports_to_csv(reports: Sequence[HitScanReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def threshold(alpha: AlgebraicReal, k: int) -> AlgebraicReal:
    """The optimal density 1/k - 1/(k alpha) as an exact value."""
    return (1 - alpha.reciprocal()) / k


class _FracTable:
    """Fractional parts {f(a)/alpha} of the scanned members, for window sums."""

    def __init__(self, window: BeattyWindow, fvals: Sequence[int]):
        self.window = window
        self.fracs = []
        for v in fvals:
            y = window.rho * v
            self.fracs.append(y - y.floor())

    def window_hit(self, idx: Sequence[int]) -> bool:
        total = self.fracs[idx[0]]
        for i in idx[1:]:
            total = total + self.fracs[i]
        return self.window.frac_above_lower(total - total.floor())


def _tuple_stream(size: int, k: int, budget: int, seed: int):
    total = size ** k
    if total <= budget:
        return "exhaustive", itertools.combinations_with_replacement(range(size), k)
    rng = random.Random(seed)
    return "sampled", (tuple(sorted(rng.randrange(size) for _ in range(k))) for _ in range(budget))


def _hit_scan(alpha: AlgebraicReal, f: PolynomialIntCoeffs, k: int, members: List[int],
              N: int, config: ScanConfig) -> Tuple[int, int, str, List[Tuple[int, ...]], int]:
    if not members:
        return 0, 0, "empty", [], 0
    window = BeattyWindow(alpha)
    fvals = [eval_poly(f, a) for a in members]
    table = _FracTable(window, fvals)
    mode, stream = _tuple_stream(len(members), k, config.sample_budget, config.seed)
    decided: Dict[int, bool] = {}
    hits = 0
    examined = 0
    disagreements = 0
    first = []
    for idx in stream:
        examined += 1
        s = sum(fvals[i] for i in idx)
        direct = decided.get(s)
        fresh = direct is None
        if fresh:
            direct = decided[s] = window.contains_by_floor(s)
        if table.window_hit(idx) != direct:
            disagreements += 1
        if direct and (fresh or config.count_tuples):
            hits += 1
            if len(first) < config.first_hits:
                first.append(tuple(members[i] for i in idx))
    return hits, examined, mode, first, disagreements


def theorem1_hit_scan(alpha: AlgebraicReal, f: PolynomialIntCoeffs, k: int, J: IntervalUnion,
                      N: int, config: ScanConfig = ScanConfig(),
                      require_above_threshold: bool = True) -> HitScanReport:
    """Count distinct k-fold f-sums of {n <= N : {f(n)/alpha} in J} lying in the Beatty sequence."""
    if k < 2:
        raise RangeError("k must be >= 2")
    alpha.require_irrational()
    thr = threshold(alpha, k)
    if require_above_threshold and thr.compare(J.measure) != Ordering.LESS:
        raise HypothesisViolated(f"mu(J) = {J.measure} does not exceed 1/k - 1/(k alpha) ~ {float(thr):.6f}")
    members, counts = _scan(alpha.reciprocal(), f, N, _in_union(J))
    if config.sample_budget < 1:
        raise BudgetExceeded("sample budget must be positive")
    hits, examined, mode, first, dis = _hit_scan(alpha, f, k, members, N, config)
    if dis:
        raise InternalProofCheckFailed(f"{dis} tuples where the floor and window criteria disagree")
    return HitScanReport(N, k, f.to_text(), alpha.to_text(), len(members), Fraction(len(members), N),
                         float(thr), hits, examined, mode, first, dis, sorted(counts.items()),
                         {"J": J.to_text(), "mu_J": format_rational(J.measure),
                          "count_mode": "tuples" if config.count_tuples else "distinct_sums"})


def hegyvari_avoidance_set(alpha: AlgebraicReal, f: PolynomialIntCoeffs, k: int, N: int,
                           config: ScanConfig = ScanConfig()) -> Tuple[HitScanReport, List[int]]:
    """Members a <= N with {f(a)/alpha} in (0, (1 - 1/alpha)/k), plus an avoidance report.

    Every member's fractional part is below w = (1 - 1/alpha)/k, so any k of
    them sum (mod 1) to something in (0, k*w) = (0, 1 - 1/alpha), outside the
    Beatty window.  That argument is checked per member; seeded samples of
    k-tuples are then re-checked through the floor route.
    """
    if k < 2:
        raise RangeError("k must be >= 2")
    alpha.require_irrational()
    rho = alpha.reciprocal()
    w = threshold(alpha, k)
    if isinstance(w, Quadratic) and (w * k - (1 - rho)).sign() != 0:
        raise InternalProofCheckFailed("k * window width differs from 1 - 1/alpha")

    members, counts = _scan(rho, f, N, _window_predicate(rho, w))
    fvals = [eval_poly(f, a) for a in members]

    # per-member window proof, re-derived through the generic object path
    proof_failures = 0
    for v in fvals:
        y = rho * v
        t = y - y.floor()
        if not (t.compare(0) == Ordering.GREATER and t.compare(w) == Ordering.LESS):
            proof_failures += 1
    if proof_failures:
        raise InternalProofCheckFailed(f"{proof_failures} members outside the avoidance window")

    window = BeattyWindow(alpha)
    rng = random.Random(config.seed)
    spot_hits = 0
    checked = 0
    first = []
    if members:
        for _ in range(config.spot_checks):
            idx = [rng.randrange(len(members)) for _ in range(k)]
            s = sum(fvals[i] for i in idx)
            checked += 1
            if window.contains_by_floor(s):
                spot_hits += 1
                if len(first) < config.first_hits:
                    first.append(tuple(members[i] for i in idx))
    if spot_hits:
        raise InternalProofCheckFailed(f"{spot_hits} sampled tuples hit the Beatty sequence")
    report = HitScanReport(
        N, k, f.to_text(), alpha.to_text(), len(members), Fraction(len(members), N), float(w),
        spot_hits, checked, "sampled", first, 0, sorted(counts.items()),
        {"window": f"(0, {w.to_text()})", "window_proof_members": len(members),
         "window_proof_failures": proof_failures,
         "density_deviation": abs(len(members) / N - float(w))})
    return report, members


def _window_predicate(rho: AlgebraicReal, w: AlgebraicReal):
    zero = Fraction(0)
    return lambda cmp: cmp(zero) > 0 and cmp(w) < 0
