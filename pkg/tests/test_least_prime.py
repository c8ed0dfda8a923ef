import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from aplab import least_prime as lp
from aplab import sieve
from aplab.least_prime import APClass, UNCONSTRAINED


def test_apclass_validation():
    APClass(1, 0)
    APClass(5, 2)
    for k, l in [(4, 2), (5, 5), (5, 0), (1, 1), (0, 0), (3, -1)]:
        with pytest.raises(ValueError):
            APClass(k, l)


def test_least_prime_examples():
    assert lp.least_prime_in_ap(APClass(5, 2)).prime == 2
    assert lp.least_prime_in_ap(APClass(7, 3)).prime == 3
    assert lp.least_prime_in_ap(APClass(10, 1)).prime == 11
    assert lp.least_prime_in_ap(UNCONSTRAINED).prime == 2


def test_least_prime_bound_exhausted():
    with pytest.raises(lp.NotFoundWithinBound):
        lp.least_prime_in_ap(APClass(10, 1), bound=10)


def test_least_prime_all_classes_to_200():
    for k in range(2, 201):
        for l in range(1, k):
            if math.gcd(k, l) == 1:
                assert lp.least_prime_in_ap(APClass(k, l)).prime == oracles.least_prime(k, l)


@given(st.integers(2, 2000), st.data())
@settings(max_examples=200)
def test_least_prime_sound(k, data):
    l = data.draw(st.integers(1, k - 1).filter(lambda v: math.gcd(v, k) == 1))
    p = lp.least_prime_in_ap(APClass(k, l)).prime
    assert p % k == l and oracles.is_prime(p)
    assert not any(oracles.is_prime(v) for v in range(l, p, k))


def test_p_max_examples():
    assert (lp.p_max(2).p_k, lp.p_max(2).l) == (3, 1)
    assert (lp.p_max(3).p_k, lp.p_max(3).l) == (7, 1)
    assert (lp.p_max(4).p_k, lp.p_max(4).l) == (5, 1)


def test_p_max_matches_brute_force_to_500():
    for k in range(2, 501):
        r = lp.p_max(k)
        assert (r.p_k, r.l) == oracles.p_max(k), k


def test_kanold_small_scan():
    rep = lp.kanold_scan(2, 2000)
    assert not rep.violations and not rep.undecided
    assert all(r.p_k < r.k ** 2 for r in rep.records)


def test_chowla_small_range():
    rep = lp.chowla_exponent_scan(2, 10)
    assert rep.k_at_max == 5 and rep.p_at_max == 19
    assert rep.max_exponent == pytest.approx(math.log(19) / math.log(5), abs=1e-12)
    assert lp.chowla_exponent(3, 7) == pytest.approx(1.771244, abs=5e-7)


def test_q_of_m_examples():
    assert [lp.least_coprime_prime(m) for m in (1, 30, 15)] == [2, 7, 2]


@given(st.integers(1, 10 ** 5))
def test_q_of_m_property(m):
    q = lp.least_coprime_prime(m)
    assert oracles.is_prime(q) and m % q
    assert all(m % p == 0 for p in oracles.primes_upto(q - 1))


def test_q_of_m_vectorized():
    ms = np.arange(1, 20001)
    assert lp.least_coprime_prime_vec(ms).tolist() == [oracles.q_of(int(m)) for m in ms]


def test_q_of_m_worst_case_is_primorial():
    rng = random.Random(7)
    for m in rng.sample(range(1, 10 ** 12), 10000):
        q = lp.least_coprime_prime(m)
        prim = 1
        for p in oracles.primes_upto(q - 1):
            prim *= p
        assert m % prim == 0


def test_ap_q_of_m():
    c = APClass(7, 3)
    assert lp.least_ap_coprime_prime(c, 3) == 17
    assert lp.least_ap_coprime_prime(APClass(5, 2), 2) == 7
    for m in range(1, 10001):
        assert lp.least_ap_coprime_prime(UNCONSTRAINED, m) == lp.least_coprime_prime(m)


def test_lemma2_constants_match_oracle():
    assert lp.lemma2_min_constant(1, 10 ** 4).empirical_constant == oracles.lemma2_constant(1, 10 ** 4) == 3
    r = lp.lemma2_min_constant(2, 10 ** 4)
    assert r.empirical_constant == oracles.lemma2_constant(2, 10 ** 4) == 31
    assert r.violations[-3:] == [18, 24, 30]
    r = lp.lemma2_min_constant(1, 2)
    assert r.empirical_constant == 3 and r.violations == [1, 2]


def test_lemma2_higher_exponent_matches_oracle():
    assert lp.lemma2_min_constant(3, 5000).empirical_constant == oracles.lemma2_constant(3, 5000)


def test_posa_thresholds():
    assert lp.posa_threshold(2, n_bound=1000) == oracles.posa_threshold(2, 1000) == 4
    assert lp.posa_threshold(1, n_bound=1000) == oracles.posa_threshold(1, 1000) == 2
    assert lp.posa_threshold(3, n_bound=300) == oracles.posa_threshold(3, 300)


def test_posa_class_sequence():
    seq = [v for v in range(2, 10 ** 5) if v % 5 == 2 and oracles.is_prime(v)]
    assert seq[:5] == [2, 7, 17, 37, 47]
    assert lp.posa_threshold(2, APClass(5, 2), 300) == oracles.posa_threshold(2, 300, seq)


def test_qpow_examples():
    assert lp.qpow_threshold_scan(1, 1.0, None, UNCONSTRAINED, 1000).empirical_constant == 4
    assert lp.qpow_threshold_scan(2, 1.0, None, UNCONSTRAINED, 1000).empirical_constant == 50
    assert lp.qpow_threshold_scan(2, 0.0, None, UNCONSTRAINED, 1000).empirical_constant == 2


def test_qpow_against_brute_force():
    # every m < n, not just primorial multiples
    qs = [0] + [oracles.q_of(m) for m in range(1, 400)]
    bad = [n for n in range(2, 400) if any(qs[m] ** 2 >= n for m in range(1, n))]
    got = lp.qpow_threshold_scan(2, 1.0, None, UNCONSTRAINED, 399)
    assert got.violations == bad


def test_euclid_matches_sieve():
    assert lp.euclid_generate(1000) == sieve.first_primes(1000).tolist()
    assert lp.euclid_generate(50) == oracles.euclid(50)


def test_coprime_examples():
    assert [lp.least_coprime_witness(a) for a in (3, 4, 6)] == [2, 3, 5]


def test_coprime_scan():
    rep = lp.coprime_existence_scan(10 ** 4)
    assert not rep.violations and rep.small_range_ok and rep.large_range_ok
    for r in rep.records[:500]:
        b = next(b for b in range(2, r.a) if math.gcd(b, r.a) == 1)
        assert r.witness == b


@given(st.integers(15, 10 ** 6))
def test_theorem5_construction_is_coprime(m):
    b = lp.theorem5_construction(m)
    assert 1 < b < m and math.gcd(b, m) == 1
