"""Tests for the arithmetic ledger: excluded primes, the ideal gcd,
exponent accounting, pairings, certified L-values, and the Waldspurger
consistency check. L-value oracles are self-convergence (doubling the
truncation stays within the certified tails) and the classical value of
the conductor-11 central L-value."""

import math
from fractions import Fraction

import pytest

from quatperiods.curves import ap, ap_naive, curve_11a1
from quatperiods.ledger import (
    an_list,
    bracket_pairing,
    central_lvalue,
    excluded_primes,
    ideal_I_gcd,
    ideal_I_profile,
    kolyvagin_exponent,
    paren_pairing,
    sha_exponent,
    waldspurger_consistency,
)
from quatperiods.periods import PeriodPipeline


PIPE = PeriodPipeline(curve_11a1(), 7)


def test_excluded_primes_11a1():
    assert excluded_primes(curve_11a1()) == {2, 3, 5, 11}
    assert excluded_primes(curve_11a1(c11=1)) == {2, 3, 5, 11}  # 11^2 - 1


def test_ap_against_naive_counts():
    E = curve_11a1()
    for ell in (2, 3, 5, 7, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        assert ap(E, ell) == ap_naive(E, ell)
    assert ap(E, 11) == 1  # split multiplicative


def test_ideal_gcd():
    E = curve_11a1()
    assert ideal_I_gcd(E, 100) == 5
    profile = ideal_I_profile(E, 100)
    assert profile[0] == (2, 5)  # 2 + 1 - a_2 = 5
    assert all(g % 5 == 0 for _, g in profile)
    with pytest.raises(ValueError):
        ideal_I_gcd(E, 2)


def test_kolyvagin_exponent_deltas():
    base = kolyvagin_exponent(1, 1, 1, 1, 1, 1)
    deltas = []
    for i in range(6):
        args = [1] * 6
        args[i] += 1
        deltas.append(kolyvagin_exponent(*args) - base)
    assert deltas == [3, 12, 1, 1, 1, 1]
    # valuation terms: v_p(I hK) + v_p(hK)
    assert kolyvagin_exponent(0, 0, 0, 0, 0, 0, p=3, I=9, hK=3) == 4
    assert kolyvagin_exponent(0, 0, 0, 0, 0, 0, p=2, I=1, hK=1) == 0


def test_sha_exponent():
    assert sha_exponent(0, []) == 0
    assert sha_exponent(3, [1, 1]) == 2
    assert sha_exponent(1, [0]) == 2


def test_pairings():
    X = PIPE.X
    q = X.alg.q
    c = 6
    const = [c] * X.H
    assert paren_pairing(const, const, X) == Fraction(c * c * (q - 1), 12)
    assert bracket_pairing(const, const, X) == Fraction(c * c * (q - 1), 12)
    f = list(PIPE.f.coords)
    # tau preserves weights, so both pairings are symmetric
    assert bracket_pairing(f, const, X) == bracket_pairing(const, f, X)
    assert paren_pairing(f, f, X) > 0


def test_an_list_frozen_and_multiplicative():
    E = curve_11a1()
    a = an_list(E, 30)
    assert a[1:12] == [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1]
    assert a[25] == a[5] * a[5] - 5  # good-prime Hecke recursion
    assert a[22] == a[2] * a[11]
    assert a[12] == a[4] * a[3]


def test_central_lvalue_11a1():
    L = central_lvalue(curve_11a1(), tail_target=1e-9)
    assert abs(L.value - 0.2538418608559107) < L.tail + 1e-7
    # self-convergence within certified tails
    L2 = central_lvalue(curve_11a1(), T=2 * L.terms)
    assert abs(L.value - L2.value) <= L.tail + L2.tail


def test_central_lvalue_twist_converges():
    E = curve_11a1()
    for D in (-23, -56):
        L = central_lvalue(E, D, tail_target=1e-7)
        L2 = central_lvalue(E, D, T=L.terms + 200)
        assert abs(L.value - L2.value) <= L.tail + L2.tail
        assert L.tail < 1e-6


def test_waldspurger_first_fields():
    for D in (-23, -56, -59):
        row = waldspurger_consistency(PIPE, D)
        assert row.status in ("consistent", "inconclusive")
        assert row.error > 0 and math.isfinite(row.lproduct)
