"""End-to-end acceptance checks; one PASS/FAIL line per criterion is printed
in the terminal summary."""
import io
import math
import random
import time

import pytest

import oracles
from aplab import goldbach as gb
from aplab import harness, tasks  # noqa: F401
from aplab import least_prime as lp
from aplab import linear as ls
from aplab import sieve
from aplab.harness import TaskConfig
from aplab.least_prime import APClass
from aplab.linear import LinearSystem

TABLE_5X2 = [
    (104, 7, 97), (114, 17, 97), (124, 17, 107), (134, 7, 127), (144, 17, 127),
    (154, 17, 137), (164, 7, 157), (174, 17, 157), (184, 17, 167), (194, 37, 157),
    (204, 7, 197), (214, 17, 197), (224, 97, 127), (234, 7, 227),
]


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def _run(task, params, tmp_path, name, fmt="csv", **kw):
    err = io.StringIO()
    cfg = TaskConfig(task, params, fmt=fmt, out=str(tmp_path / name), **kw)
    code = harness.run(cfg, stderr=err)
    return code, cfg.out, err.getvalue()


@pytest.mark.criterion(1, "5x+2 decomposition table regression")
def test_table_regression():
    cls = APClass(5, 2)
    with Clock() as c:
        for target, p, q in TABLE_5X2:
            w = gb.GoldbachWitness(target, p, q, cls)
            assert w.validate(), (target, p, q)
            assert p % 5 == 2 and q % 5 == 2 and p != q and p + q == target
            assert (p, q) in [(x.p, x.q) for x in gb.ap_goldbach_for_target(cls, target)]
    assert c.elapsed < 1.0


@pytest.mark.criterion(2, "least prime in AP equals trial division, all k <= 200")
def test_least_prime_oracle():
    with Clock() as c:
        mismatches = [(k, l) for k in range(2, 201) for l in range(1, k)
                      if math.gcd(k, l) == 1
                      and lp.least_prime_in_ap(APClass(k, l)).prime != oracles.least_prime(k, l)]
    assert mismatches == []
    assert c.elapsed < 10.0


@pytest.mark.criterion(3, "p(k) < k^2 for 2 <= k <= 10^4")
def test_kanold(tmp_path):
    with Clock() as c:
        code, out, err = _run("kanold-scan", {"from": 2, "to": 10 ** 4}, tmp_path, "kanold.csv")
    rows = harness.read_report(out, "csv")
    assert len(rows) == 9999
    assert [r for r in rows if r["verdict"] != "ok"] == []
    assert all(int(r["p_k"]) < int(r["k"]) ** 2 for r in rows)
    assert code == harness.EXIT_OK, err
    assert c.elapsed < 180.0


@pytest.mark.criterion(4, "coprime-difference witness for every 6 < n <= 5000")
def test_conj2_scan(tmp_path):
    with Clock() as c:
        code, out, err = _run("conj2-scan", {"from": 7, "to": 5000}, tmp_path, "c2.jsonl", "jsonl")
        rows = harness.read_report(out, "jsonl")
        rng = random.Random(5000)
        sample = rng.sample(rows, len(rows) // 100)
        for r in sample:
            assert oracles.conj2_valid(r["n"], r["p_r"]), r
    assert code == harness.EXIT_OK
    assert len(rows) == 4994 and all(r["verdict"] == "witness" for r in rows)
    assert "fast-path hit rate" in err
    print(err.strip())
    assert c.elapsed < 60.0


@pytest.mark.criterion(5, "Euclid generator reproduces the first 1000 primes")
def test_euclid():
    with Clock() as c:
        seq = lp.euclid_generate(1000)
    assert seq == sieve.first_primes(1000).tolist()
    assert c.elapsed < 1.0


@pytest.mark.criterion(6, "threshold constants 31 and 4 match brute force")
def test_thresholds():
    ref_l2 = oracles.lemma2_constant(2, 10 ** 4)
    ref_posa = oracles.posa_threshold(2, 10 ** 3)
    assert (ref_l2, ref_posa) == (31, 4)
    assert lp.lemma2_min_constant(2, 10 ** 4).empirical_constant == ref_l2
    assert lp.posa_threshold(2, n_bound=10 ** 3) == ref_posa


@pytest.mark.criterion(7, "every row and column of M holds a prime, 2 <= n <= 500")
def test_matrix(tmp_path):
    with Clock() as c:
        code, out, _ = _run("matrix-check", {"n": None, "from": 2, "to": 500}, tmp_path, "m.csv")
    rows = harness.read_report(out, "csv")
    assert len(rows) == 499 and all(r["verdict"] == "ok" for r in rows)
    assert code == harness.EXIT_OK
    assert c.elapsed < 120.0


@pytest.mark.criterion(8, "admissibility matches residue oracle; F1/F2 found for phi(n) <= 12")
def test_admissibility_and_f1f2():
    rng = random.Random(8)
    bad = []
    for _ in range(1000):
        m = rng.randint(1, 6)
        pairs = set()
        while len(pairs) < m:
            pairs.add((rng.randint(1, 50), rng.randint(0, 50)))
        pairs = sorted(pairs)
        if ls.admissible_check(LinearSystem.of(pairs)).admissible != oracles.admissible(pairs):
            bad.append(pairs)
    assert bad == []
    missing = [n for n in range(2, 51) if sieve.totient(n) <= 12 and ls.f1f2_search(n) is None]
    assert missing == []


@pytest.mark.criterion(9, "merged least prime below (dk)^1.9 for d <= 500, three classes")
def test_conj4(tmp_path):
    with Clock() as c:
        for k, l in [(3, 2), (4, 3), (5, 2)]:
            params = {"k": k, "l": l, "d": None, "a": None, "epsilon": 0.1, "from": 2, "to": 500}
            code, out, err = _run("conj4-check", params, tmp_path, f"c4_{k}_{l}.csv")
            rows = harness.read_report(out, "csv")
            assert len(rows) == sum(1 for d in range(2, 501) if math.gcd(d, k) == 1)
            assert [r for r in rows if r["verdict"] != "ok"] == [], err
            assert code == harness.EXIT_OK
    assert c.elapsed < 120.0


@pytest.mark.criterion(10, "conj2-scan [7,2000] identical for 1 vs 8 workers and after kill/resume")
def test_determinism(tmp_path):
    params = {"from": 7, "to": 2000}
    code1, one, _ = _run("conj2-scan", params, tmp_path, "one.csv", jobs=1)
    code8, eight, _ = _run("conj2-scan", params, tmp_path, "eight.csv", jobs=8)
    ck = str(tmp_path / "ck.json")
    cfg = TaskConfig("conj2-scan", params, out=str(tmp_path / "resumed.csv"), checkpoint=ck)
    assert harness.run(cfg, stderr=io.StringIO(), interrupt_after=4) == harness.EXIT_INTERNAL
    assert harness.checkpoint_load(ck).cursor == 7 + 4 * 256 - 1
    assert harness.run(cfg, stderr=io.StringIO()) == harness.EXIT_OK
    assert code1 == code8 == harness.EXIT_OK
    with open(one, "rb") as a, open(eight, "rb") as b, open(cfg.out, "rb") as r:
        ref = a.read()
        assert ref == b.read() == r.read()
