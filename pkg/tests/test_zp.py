from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from modbm.errors import BudgetExceeded, ModulusMismatch, RangeError
from modbm.zp import (CDConfig, ResidueSet, cd_lower_bound, is_prime, k_fold_sumset,
                      next_prime_at_least, partial_sumsets, sumset, verify_cd_exhaustive)


def brute_sumset(xs, ys, p):
    return sorted({(a + b) % p for a in xs for b in ys})


def sieve(n):
    flags = [True] * (n + 1)
    flags[0] = flags[1] = False
    for i in range(2, int(n ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = [False] * len(flags[i * i::i])
    return flags


class TestSumset:
    def test_p7(self):
        s = sumset(ResidueSet.of(7, [0, 1, 3]), ResidueSet.of(7, [0, 2]))
        assert s.members().tolist() == [0, 1, 2, 3, 5] and len(s) == 5

    def test_identity(self):
        y = ResidueSet.of(5, [1, 4])
        assert sumset(ResidueSet.of(5, [0]), y) == y

    def test_p5(self):
        assert sumset(ResidueSet.of(5, [1, 2]), ResidueSet.of(5, [1, 2])).members().tolist() == [2, 3, 4]

    def test_modulus_mismatch(self):
        with pytest.raises(ModulusMismatch):
            sumset(ResidueSet.of(5, [1]), ResidueSet.of(7, [1]))

    def test_composite_rejected(self):
        with pytest.raises(RangeError):
            ResidueSet.of(6, [1])


class TestKFold:
    def test_three_fold(self):
        s = k_fold_sumset(ResidueSet.of(5, [1, 2]), 3)
        assert s.members().tolist() == [0, 1, 3, 4]
        assert len(s) == min(5, 3 * 2 - 2)

    def test_k1(self):
        x = ResidueSet.of(11, [2, 3, 7])
        assert k_fold_sumset(x, 1) == x

    def test_full(self):
        assert k_fold_sumset(ResidueSet.full(5), 2) == ResidueSet.full(5)


@pytest.mark.parametrize(("a", "b", "p", "expected"), [(2, 2, 5, 3), (5, 5, 5, 5), (217, 217, 727, 433)])
def test_cd_lower_bound(a, b, p, expected):
    assert cd_lower_bound(a, b, p) == expected


primes = st.sampled_from([2, 3, 5, 7, 11, 13, 31, 61, 127, 257])


@st.composite
def residue_pair(draw):
    p = draw(primes)
    xs = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=p))
    ys = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=p))
    return p, xs, ys


@given(residue_pair())
def test_sumset_matches_brute_force(case):
    p, xs, ys = case
    assert sumset(ResidueSet.of(p, xs), ResidueSet.of(p, ys)).members().tolist() == brute_sumset(xs, ys, p)


@given(residue_pair())
def test_cauchy_davenport(case):
    p, xs, ys = case
    x, y = ResidueSet.of(p, xs), ResidueSet.of(p, ys)
    assert len(sumset(x, y)) >= cd_lower_bound(len(x), len(y), p)


@given(residue_pair(), st.lists(st.integers(0, 256), min_size=1, max_size=10))
def test_commutative_associative(case, zs):
    p, xs, ys = case
    x, y, z = ResidueSet.of(p, xs), ResidueSet.of(p, ys), ResidueSet.of(p, zs)
    assert sumset(x, y) == sumset(y, x)
    assert sumset(sumset(x, y), z) == sumset(x, sumset(y, z))


@given(residue_pair(), st.integers(1, 5))
def test_k_fold_recursion_and_cover(case, k):
    p, xs, _ = case
    x = ResidueSet.of(p, xs)
    parts = partial_sumsets(x, k)
    for j in range(1, k):
        assert parts[j] == sumset(parts[j - 1], x)
    if k * len(x) - k + 1 >= p:
        assert parts[-1] == ResidueSet.full(p)


@given(primes.filter(lambda p: p > 2), st.data())
def test_progressions_are_tight(p, data):
    m = data.draw(st.integers(1, (p + 1) // 2))
    x = ResidueSet.interval(p, 0, m)
    assert len(sumset(x, x)) == cd_lower_bound(m, m, p)


@settings(max_examples=30)
@given(st.integers(2, 2000))
def test_run_smear_matches_shift_or(p):
    if not is_prime(p):
        return
    x = ResidueSet.interval(p, p // 3, p // 4 + 1) | ResidueSet.of(p, [0, 5 % p])
    y = ResidueSet.interval(p, p - 3, 7)
    slow = 0
    for a in x.members().tolist():
        slow |= y.shift(a).mask
    assert sumset(x, y).mask == slow


class TestPrimes:
    def test_against_sieve(self):
        flags = sieve(20000)
        assert all(is_prime(n) == flags[n] for n in range(20001))

    def test_large_known(self):
        assert is_prime(2 ** 61 - 1) and not is_prime(2 ** 61 + 1)
        assert is_prime(18446744073709551557)  # largest 64-bit prime

    @pytest.mark.parametrize(("x", "expected"), [(F(2180, 3), 727), (2, 2), (8, 11), (F(7, 2), 5)])
    def test_next_prime(self, x, expected):
        assert next_prime_at_least(x) == expected

    def test_727_has_no_small_factor(self):
        assert all(727 % q for q in range(2, 27))

    def test_beyond_64_bits(self):
        with pytest.raises(RangeError):
            next_prime_at_least(2 ** 64)
        with pytest.raises(RangeError):
            next_prime_at_least(1)


class TestVerifyCD:
    def test_p2(self):
        r = verify_cd_exhaustive(2)
        assert (r.pairs_checked, r.violations) == (9, 0)

    def test_p5(self):
        r = verify_cd_exhaustive(5)
        assert (r.pairs_checked, r.violations, r.mode) == (961, 0, "exhaustive")

    def test_p13_sampled(self):
        r = verify_cd_exhaustive(13, CDConfig(samples=5000))
        assert r.mode == "sampled" and r.violations == 0 and r.pairs_checked == 5000

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            verify_cd_exhaustive(13, sampled=False)
