import math
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from aplab import goldbach as gb
from aplab.least_prime import APClass, UNCONSTRAINED

TABLE_5X2 = [
    (104, 7, 97), (114, 17, 97), (124, 17, 107), (134, 7, 127), (144, 17, 127),
    (154, 17, 137), (164, 7, 157), (174, 17, 157), (184, 17, 167), (194, 37, 157),
    (204, 7, 197), (214, 17, 197), (224, 97, 127), (234, 7, 227),
]


def _brute_pairs(target, k=1, l=0):
    return [(p, target - p) for p in range(2, target // 2)
            if p % k == l and (target - p) % k == l
            and oracles.is_prime(p) and oracles.is_prime(target - p)]


@pytest.mark.parametrize("target,p,q", TABLE_5X2)
def test_table_pairs_are_listed(target, p, q):
    cls = APClass(5, 2)
    w = gb.GoldbachWitness(target, p, q, cls)
    assert w.validate()
    found = gb.ap_goldbach_for_target(cls, target)
    assert (p, q) in [(x.p, x.q) for x in found]


def test_full_decomposition_set_114():
    got = [(w.p, w.q) for w in gb.ap_goldbach_for_target(APClass(5, 2), 114)]
    assert got == [(7, 107), (17, 97), (47, 67)]


def test_w_parametrization():
    assert gb.ap_goldbach_decompositions(APClass(5, 2), 10, "first")[0].target == 104


def test_bad_targets():
    with pytest.raises(ValueError):
        gb.goldbach_decompositions(7)
    with pytest.raises(ValueError):
        gb.ap_goldbach_for_target(APClass(5, 2), 106)


def test_goldbach_small_targets():
    assert [(w.p, w.q) for w in gb.goldbach_decompositions(100)] == _brute_pairs(100)
    with pytest.raises(gb.NoneFound):
        gb.ap_goldbach_for_target(APClass(5, 2), 4)


def test_unconstrained_class_equals_plain_goldbach():
    for t in range(8, 10001, 2):
        plain = [(w.p, w.q) for w in gb.goldbach_decompositions(t)]
        ap = [(w.p, w.q) for w in gb.ap_goldbach_for_target(UNCONSTRAINED, t)]
        assert plain == ap


@given(st.sampled_from([(3, 1), (3, 2), (4, 1), (4, 3), (5, 2), (7, 3)]), st.integers(3, 400))
@settings(max_examples=150)
def test_ap_goldbach_against_brute_force(kl, w):
    cls = APClass(*kl)
    target = 2 * (cls.k * w + cls.l)
    want = _brute_pairs(target, *kl)
    if not want:
        with pytest.raises(gb.NoneFound):
            gb.ap_goldbach_for_target(cls, target)
    else:
        assert [(x.p, x.q) for x in gb.ap_goldbach_for_target(cls, target)] == want


def test_conj2_examples_and_validation():
    w = gb.conjecture2_witness(7)
    assert (w.p_r, w.difference) == (3, 11)
    assert gb.validate_conj2_witness(w)
    bogus = gb.Conj2Witness(30, 3, 57, False)
    assert not gb.validate_conj2_witness(bogus)
    with pytest.raises(ValueError):
        gb.conjecture2_witness(6)


def test_conj2_first_range_against_oracle():
    for n in range(7, 400):
        w = gb.conjecture2_witness(n)
        assert oracles.conj2_valid(n, w.p_r)
        smaller = [p for p in range(3, w.p_r, 2) if oracles.is_prime(p)]
        assert not any(oracles.conj2_valid(n, p) for p in smaller), n


def test_conj2_fast_path_soundness():
    # 2n = p + q, p < q primes, gcd(p, n) = 1  =>  p is a valid witness
    for n in range(7, 2001):
        pairs = [(p, q) for p, q in _brute_pairs(2 * n) if p > 2 and math.gcd(p, n) == 1]
        if pairs:
            w = gb.conjecture2_witness(n)
            assert w.p_r <= pairs[0][0]
            assert gb.validate_conj2_witness(gb.Conj2Witness(n, pairs[0][0], pairs[0][1], True))


def test_conj2_scan_with_sampled_revalidation():
    rep = gb.conjecture2_scan(7, 3000)
    assert not rep.counterexamples
    rng = random.Random(11)
    for w in rng.sample(rep.witnesses, len(rep.witnesses) // 100):
        assert gb.validate_conj2_witness(w)
    assert 0.9 < rep.fast_path_rate <= 1.0


def test_conj3_examples():
    w = gb.conjecture3_witness(APClass(5, 2), 10)
    assert w.q_r == 7 and w.index == 2
    assert gb.validate_conj3_witness(w)
    w = gb.conjecture3_witness(APClass(4, 3), 5)
    assert w.q_r == 11 and not w.fast_path and gb.validate_conj3_witness(w)
    with pytest.raises(gb.DegenerateInput):
        gb.conjecture3_witness(APClass(5, 2), 1)


@given(st.sampled_from([(3, 1), (3, 2), (4, 3), (5, 2), (6, 5), (10, 3)]), st.integers(2, 300))
@settings(max_examples=100)
def test_conj3_witness_validates(kl, n):
    cls = APClass(*kl)
    try:
        w = gb.conjecture3_witness(cls, n)
    except gb.DegenerateInput:
        return
    assert gb.validate_conj3_witness(w)


def test_lemma1():
    assert gb.lemma1_witness(7) == (3, 5)
    assert gb.lemma1_witness(15) == (7, 11)
    for n in range(7, 3000):
        p, q = gb.lemma1_witness(n)
        assert p < q < n and math.gcd(p * q, n) == 1


def test_lemma7_examples():
    assert gb.lemma7_witness(UNCONSTRAINED, 3, 50) == (7, 13)
    assert gb.lemma7_witness(APClass(4, 3), 3, 25) == (11, 23)
    with pytest.raises(gb.NoneFound):
        gb.lemma7_witness(APClass(4, 3), 3, 1)
    with pytest.raises(ValueError):
        gb.lemma7_witness(APClass(3, 1), 3, 5)


def test_lemma7_brute_force():
    cls, p = APClass(4, 3), 5
    for n in range(1, 300):
        v = 4 * n + 3
        if math.gcd(p, v) != 1:
            continue
        want = [x for x in range(3, v + 1, 2) if x % 4 == 3 and x % p == (2 * v) % p
                and math.gcd(x, v) == 1 and oracles.is_prime(x)][:2]
        if len(want) < 2:
            with pytest.raises(gb.NoneFound):
                gb.lemma7_witness(cls, p, n)
        else:
            assert gb.lemma7_witness(cls, p, n) == tuple(want)


def test_bertrand_analogue():
    assert gb.bertrand_ap_check(APClass(3, 1), 1, 10 ** 4) == []
    recs = gb.bertrand_records(APClass(3, 1), 1, 2)
    assert [r.prime for r in recs] == [7, 13]
