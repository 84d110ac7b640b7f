import random
from dataclasses import replace
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from modbm.errors import HypothesisViolated, NotOpen, PrimeCapExceeded, RangeError
from modbm.torus import make
from modbm.witness import (TIGHT, WitnessConfig, evaluate_checks, find_witness, grid_points,
                           prime_bound, random_instance, sharpness_scan, shrink_radius, verify_trace)
from modbm.zp import ResidueSet

GOLDEN = Path(__file__).parent / "golden"

A0 = make([(0, F(3, 10))])
B0 = make([(F(1, 2), 1)])


@pytest.fixture(scope="module")
def worked():
    return find_witness(A0, B0, 2)


class TestWorkedInstance:
    def test_parameters(self, worked):
        # delta = 2*3/10 + 1/2 - 1 ; r = min(t/4, delta/4) ; bound = max(2/(1/2 - 1/20), 2/(3/10)) + 24*3/(1/10)
        assert worked.delta == F(1, 10)
        assert worked.r == F(1, 40)
        assert worked.B2 == make([(F(21, 40), F(39, 40))])
        assert worked.prime_bound == max(F(40, 9), F(20, 3)) + 720 == F(2180, 3)
        assert worked.p == 727

    def test_grid_sets(self, worked):
        assert worked.Atilde.runs() == [(1, 218)]
        assert worked.Btilde.runs() == [(382, 708)]

    def test_witness(self, worked):
        assert sum(worked.residue_witness) % 727 == worked.target == 382
        assert all(A0.contains_rational(x) for x in worked.real_witness)
        assert B0.contains_rational(worked.witness_sum)

    def test_all_checks_hold(self, worked):
        assert worked.checks and all(c.holds for c in worked.checks)

    def test_verifies(self, worked):
        assert verify_trace(worked, A0, B0, 2)

    def test_golden(self, worked):
        assert worked.to_json() + "\n" == (GOLDEN / "witness_worked.json").read_text()


class TestTamper:
    def test_composite_p(self, worked):
        assert verify_trace(replace(worked, p=6), A0, B0, 2).failure == "p not prime"

    def test_sum_outside_B(self, worked):
        bad = replace(worked, real_witness=(F(1, 5), F(1, 5)))
        assert verify_trace(bad, A0, B0, 2).failure == "sum not in B"

    def test_witness_outside_A(self, worked):
        bad = replace(worked, real_witness=(F(1, 2), F(1, 5)))
        assert verify_trace(bad, A0, B0, 2).failure == "witness element not in A"

    def test_wrong_k(self, worked):
        assert not verify_trace(worked, A0, B0, 3)

    def test_wrong_bound(self, worked):
        assert verify_trace(replace(worked, prime_bound=F(700)), A0, B0, 2).failure == "prime bound mismatch"

    def test_wrong_atilde(self, worked):
        bad = replace(worked, Atilde=worked.Atilde | ResidueSet.of(727, [400]))
        assert verify_trace(bad, A0, B0, 2).failure == "Atilde mismatch"


class TestErrors:
    def test_delta_zero(self):
        with pytest.raises(HypothesisViolated):
            find_witness(make([(0, F(1, 4))]), B0, 2)

    def test_closed_B(self):
        with pytest.raises(NotOpen):
            find_witness(A0, make([(F(1, 2), 1, False, True)]), 2)

    def test_k_one(self):
        with pytest.raises(RangeError):
            find_witness(A0, B0, 1)

    def test_A_touching_zero(self):
        with pytest.raises(RangeError):
            find_witness(make([(0, F(3, 10), False, True)]), B0, 2)

    def test_prime_cap(self):
        with pytest.raises(PrimeCapExceeded):
            find_witness(A0, B0, 2, WitnessConfig(prime_cap=500))

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            WitnessConfig(mode="lazy")


def test_tight_mode_finds_smaller_prime():
    full = make([(0, 1)])
    tr = find_witness(full, full, 2, WitnessConfig(mode=TIGHT))
    assert tr.p == 3 and tr.real_witness == (F(2, 3), F(2, 3))
    assert verify_trace(tr, full, full, 2)


def test_tight_never_exceeds_faithful(worked):
    tr = find_witness(A0, B0, 2, WitnessConfig(mode=TIGHT))
    assert tr.p <= worked.p and verify_trace(tr, A0, B0, 2)


def test_grid_points_add_left_endpoints():
    cells = ResidueSet.of(11, [3, 4, 5, 9])
    assert grid_points(cells).members().tolist() == [2, 3, 4, 5, 8, 9]


def test_prime_bound_shrinks_as_delta_grows():
    B = make([(F(1, 4), 1)])
    prev = None
    for num in range(3, 10):
        A = make([(F(1, 100), F(num, 20))])
        delta = 2 * A.measure + B.measure - 1
        if delta <= 0:
            continue
        t, r = shrink_radius(B, delta)
        bound = prime_bound(B, A, r, delta, 2)
        if prev is not None:
            assert bound < prev
        prev = bound


@st.composite
def instances(draw):
    seed = draw(st.integers(0, 2 ** 32))
    return random_instance(random.Random(seed), max_bound=F(20000))


@settings(max_examples=40, deadline=None)
@given(instances())
def test_random_instances_verify(inst):
    A, B, k = inst
    tr = find_witness(A, B, k)
    assert tr.p > tr.prime_bound
    assert all(c.holds for c in tr.checks)
    assert verify_trace(tr, A, B, k)
    assert evaluate_checks(tr) == list(tr.checks)


@settings(max_examples=25, deadline=None)
@given(instances(), st.integers(1, 40))
def test_enlarging_A_keeps_solvable(inst, grow):
    A, B, k = inst
    # widen the last A interval towards 1 by up to grow/400
    last = A.intervals[-1]
    right = min(F(399, 400), last.right + F(grow, 400))
    bigger = make([(iv.left, iv.right) for iv in A.intervals[:-1]] + [(last.left, right)])
    tr = find_witness(bigger, B, k, WitnessConfig(mode=TIGHT))
    assert verify_trace(tr, bigger, B, k)


@pytest.mark.parametrize("beta", [F(1, 4), F(1, 2), F(3, 4)])
@pytest.mark.parametrize("k", [2, 3])
def test_sharpness(beta, k):
    rep = sharpness_scan(beta, k, 40)
    assert rep.all_sums_below_beta and rep.hits_in_B == 0
    assert rep.max_sum == beta * F(39, 40)
    assert rep.boundary_rejected


def test_sharpness_sampled_mode():
    rep = sharpness_scan(F(1, 2), 3, 200, budget=5000)
    assert rep.enumeration == "sampled" and rep.tuples_checked == 5000 and rep.hits_in_B == 0
