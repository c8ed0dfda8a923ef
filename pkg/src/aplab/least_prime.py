"""Least primes with a property: p(k,l), p(k), q(m), Q(m) and the
threshold-constant scans built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import mpmath
import numpy as np

from . import sieve
from .sieve import is_prime, log_less

DEFAULT_BOUND_FLOOR = 10**6
HARD_CAP = 1 << 42
_MP_DPS = 60


class NotFoundWithinBound(LookupError):
    def __init__(self, msg: str, bound: int):
        super().__init__(msg)
        self.bound = bound


@dataclass(frozen=True)
class APClass:
    """Reduced residue class l mod k; APClass(1, 0) means no restriction."""

    k: int
    l: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"modulus must be >= 1, got {self.k}")
        sieve.check_u64(self.k, "modulus")
        if self.k == 1:
            if self.l != 0:
                raise ValueError("the unconstrained class is (k=1, l=0)")
            return
        if not 1 <= self.l <= self.k - 1:
            raise ValueError(f"residue {self.l} not in [1, {self.k - 1}]")
        if math.gcd(self.k, self.l) != 1:
            raise ValueError(f"gcd({self.k}, {self.l}) != 1")

    @property
    def constrained(self) -> bool:
        return self.k > 1

    def contains(self, v: int) -> bool:
        return v % self.k == self.l

    def members(self, start_x: int = 0) -> Iterator[int]:
        v = self.l + start_x * self.k
        while True:
            yield v
            v += self.k

    def __str__(self):
        return f"{self.l} mod {self.k}" if self.constrained else "unconstrained"


UNCONSTRAINED = APClass(1, 0)


def class_primes_upto(cls: APClass, limit: int) -> np.ndarray:
    """Primes <= limit lying in the class, ascending."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    ps = sieve.primes_in_range(2, limit)
    if not cls.constrained:
        return ps
    return ps[ps % cls.k == cls.l]


def class_primes(cls: APClass, count: int) -> np.ndarray:
    """The first `count` primes of the class (the Q-sequence)."""
    limit = max(64, 4 * count * cls.k)
    while True:
        qs = class_primes_upto(cls, limit)
        if len(qs) >= count:
            return qs[:count]
        limit *= 2


# ---------------------------------------------------------------------------
# p(k, l) and p(k)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeastPrimeRecord:
    cls: APClass
    prime: int
    candidates_tested: int
    bound_used: int


def _default_bound(k: int) -> int:
    return max(k * k, DEFAULT_BOUND_FLOOR)


def least_prime_in_ap(cls: APClass, bound: Optional[int] = None) -> LeastPrimeRecord:
    """Least prime congruent to l mod k, scanning l, l+k, l+2k, ...

    With an explicit bound the search stops there; otherwise it starts at
    max(k^2, 10^6) and doubles up to 2^42.
    """
    explicit = bound is not None
    if explicit and bound < 2:
        raise ValueError("bound must be >= 2")
    cur = bound if explicit else min(_default_bound(cls.k), HARD_CAP)
    tested = 0
    v = cls.l
    while True:
        while v <= cur:
            tested += 1
            if is_prime(v):
                return LeastPrimeRecord(cls, v, tested, cur)
            v += cls.k
        if explicit or cur >= HARD_CAP:
            raise NotFoundWithinBound(f"no prime {cls} up to {cur}", cur)
        cur = min(2 * cur, HARD_CAP)


@dataclass(frozen=True)
class PkRecord:
    k: int
    p_k: int
    l: int
    bound_used: int


def p_max(k: int, bound: Optional[int] = None) -> PkRecord:
    """p(k): the largest of the least primes over all reduced classes mod k.

    Streams primes in ascending windows, recording the first prime seen in each
    residue class; the class covered last determines p(k).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    explicit = bound is not None
    cur_bound = bound if explicit else min(_default_bound(k), HARD_CAP)
    residues = np.arange(k, dtype=np.int64)
    reduced = np.gcd(residues, k) == 1
    sentinel = np.iinfo(np.int64).max
    first = np.full(k, sentinel, dtype=np.int64)
    lo, hi = 0, min(cur_bound, max(1024, 8 * k))
    while True:
        ps = sieve.primes_in_range(lo, hi)
        if len(ps):
            np.minimum.at(first, ps % k, ps)
        hits = first[reduced]
        if hits.max() != sentinel:
            i = int(np.argmax(hits))
            l = int(residues[reduced][i])
            return PkRecord(k, int(hits[i]), l, cur_bound)
        if hi >= cur_bound:
            if explicit or cur_bound >= HARD_CAP:
                raise NotFoundWithinBound(
                    f"some class mod {k} has no prime up to {cur_bound}", cur_bound)
            cur_bound = min(2 * cur_bound, HARD_CAP)
        lo, hi = hi + 1, min(2 * hi, cur_bound)


@dataclass
class KanoldRecord:
    k: int
    p_k: Optional[int]
    l: Optional[int]
    bound_used: int
    verdict: str  # ok | violation | undecided


def kanold_record(k: int) -> KanoldRecord:
    try:
        r = p_max(k)
    except (NotFoundWithinBound, sieve.RangeTooLarge) as exc:
        return KanoldRecord(k, None, None, getattr(exc, "bound", HARD_CAP), "undecided")
    verdict = "ok" if r.p_k < k * k else "violation"
    return KanoldRecord(k, r.p_k, r.l, r.bound_used, verdict)


@dataclass
class KanoldReport:
    records: List[KanoldRecord]

    @property
    def violations(self) -> List[KanoldRecord]:
        return [r for r in self.records if r.verdict == "violation"]

    @property
    def undecided(self) -> List[KanoldRecord]:
        return [r for r in self.records if r.verdict == "undecided"]


def kanold_scan(k_from: int, k_to: int) -> KanoldReport:
    """Check p(k) < k^2 for every k in [k_from, k_to]."""
    if not 2 <= k_from <= k_to:
        raise ValueError("need 2 <= k_from <= k_to")
    return KanoldReport([kanold_record(k) for k in range(k_from, k_to + 1)])


@dataclass
class ChowlaReport:
    max_exponent: float
    k_at_max: int
    p_at_max: int
    # (k, p(k), log p(k) / log k), largest exponent first
    profile: List[Tuple[int, int, float]]
    undecided: List[int] = field(default_factory=list)


def chowla_exponent(k: int, p: int) -> float:
    return math.log(p) / math.log(k)


def chowla_exponent_scan(k_from: int, k_to: int) -> ChowlaReport:
    if not 2 <= k_from <= k_to:
        raise ValueError("need 2 <= k_from <= k_to")
    profile, undecided = [], []
    for rec in kanold_scan(k_from, k_to).records:
        if rec.p_k is None:
            undecided.append(rec.k)
        else:
            profile.append((rec.k, rec.p_k, chowla_exponent(rec.k, rec.p_k)))
    profile.sort(key=lambda t: (-t[2], t[0]))
    if not profile:
        return ChowlaReport(float("nan"), 0, 0, [], undecided)
    k, p, e = profile[0]
    return ChowlaReport(e, k, p, profile, undecided)


# ---------------------------------------------------------------------------
# q(m) and Q(m)
# ---------------------------------------------------------------------------

def least_coprime_prime(m: int) -> int:
    """q(m), the smallest prime not dividing m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    sieve.check_u64(m)
    # the first 16 primes already multiply past 2^64
    for p in sieve.first_primes(16).tolist():
        if m % p:
            return p
    raise AssertionError("unreachable for 64-bit m")


def least_ap_coprime_prime(cls: APClass, m: int, bound: int = HARD_CAP) -> int:
    """Q(m): least prime of the class coprime to m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    for v in cls.members():
        if v > bound:
            break
        if math.gcd(v, m) == 1 and is_prime(v):
            return v
    raise NotFoundWithinBound(f"no prime {cls} coprime to {m} up to {bound}", bound)


def least_coprime_prime_vec(ms: np.ndarray) -> np.ndarray:
    """q(m) for every entry of an int64 array."""
    out = np.zeros(len(ms), dtype=np.int64)
    todo = np.ones(len(ms), dtype=bool)
    for p in sieve.first_primes(64).tolist():
        hit = todo & (ms % p != 0)
        out[hit] = p
        todo &= ~hit
        if not todo.any():
            return out
    raise sieve.Overflow64("q(m) beyond the 64th prime")


# ---------------------------------------------------------------------------
# threshold constants
# ---------------------------------------------------------------------------

@dataclass
class ThresholdReport:
    params: Dict[str, object]
    empirical_constant: int
    scan_start: int
    scan_bound: int
    violations: List[int]
    constructive_bound: Optional[int] = None


def _constant_from(violations: List[int], start: int) -> int:
    return violations[-1] + 1 if violations else start


def lemma2_min_constant(k_exp: int, scan_bound: int) -> ThresholdReport:
    """Least C with q(m)^k_exp < m for all C <= m <= scan_bound."""
    if k_exp < 1:
        raise ValueError("exponent must be >= 1")
    if scan_bound < 2:
        raise ValueError("scan_bound must be >= 2")
    ms = np.arange(1, scan_bound + 1, dtype=np.int64)
    qs = least_coprime_prime_vec(ms)
    ok = sieve.log_less_vec(k_exp * np.log(qs.astype(float)), np.log(ms.astype(float)),
                            lambda i: int(qs[i]) ** k_exp < int(ms[i]))
    violations = ms[~ok].tolist()
    try:
        n_k = posa_threshold(k_exp, UNCONSTRAINED, 1000)
        constructive = sieve.primorial_exact(n_k)
    except sieve.Overflow64:
        constructive = None
    return ThresholdReport({"k_exp": k_exp}, _constant_from(violations, 1), 1,
                           scan_bound, violations, constructive)


def _prime_sequence(cls: APClass, count: int) -> List[int]:
    if cls.constrained:
        return class_primes(cls, count).tolist()
    return sieve.first_primes(count).tolist()


def posa_failures(k_exp: int, cls: APClass, n_bound: int) -> List[int]:
    """Indices n in [1, n_bound] where P_{n+1}^k >= P_1 ... P_n.

    P is the prime sequence, or the class-prime sequence when constrained.
    """
    seq = _prime_sequence(cls, n_bound + 1)
    logs = [math.log(p) for p in seq]
    failures = []
    acc = 0.0
    prod = 1
    for n in range(1, n_bound + 1):
        acc += logs[n - 1]
        prod *= seq[n - 1]
        nxt = seq[n]
        if not log_less(k_exp * logs[n], acc, lambda: nxt ** k_exp < prod):
            failures.append(n)
    return failures


def posa_threshold(k_exp: int, cls: APClass = UNCONSTRAINED, n_bound: int = 1000) -> int:
    """Least n_k with P_{n+1}^k < P_1 ... P_n for all n_k <= n <= n_bound."""
    if n_bound < 2:
        raise ValueError("n_bound must be >= 2")
    if k_exp < 1:
        raise ValueError("exponent must be >= 1")
    return _constant_from(posa_failures(k_exp, cls, n_bound), 1)


def qpow_threshold_scan(k_exp: int, alpha: Optional[float], epsilon: Optional[float],
                        cls: APClass, n_bound: int) -> ThresholdReport:
    """Least C such that every n in [C, n_bound] satisfies the power inequality
    for all positive m below the m-range.

    Without epsilon: Q(m)^k_exp < n for all m < n^alpha.
    With epsilon: 2^(1/eps) Q(m)^((2-eps)/eps) < n for all m < n^alpha, alpha
    defaulting to 2-eps; a constrained class adds the factor k^((2-eps)/eps)
    and widens the range to m < k^(3-eps) n^alpha.

    Q(m) = Q_j forces Q_1 ... Q_{j-1} | m, and m = Q_1 ... Q_{j-1} attains it,
    so the worst m below a limit is the largest sequence primorial below it;
    only those are enumerated.
    """
    if n_bound < 4:
        raise ValueError("n_bound must be >= 4")
    if epsilon is not None and not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    if alpha is None:
        if epsilon is None:
            raise ValueError("alpha is required without epsilon")
        alpha = 2 - epsilon
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    k = cls.k
    widen = epsilon is not None and cls.constrained
    log_k = math.log(k)
    extra = (3 - epsilon) * log_k if widen else 0.0

    def log_mlimit(n: int) -> float:
        return alpha * math.log(n) + extra

    # enough sequence terms that the primorial passes the largest m-limit
    target = log_mlimit(n_bound) + 1.0
    count = 16
    while True:
        seq = _prime_sequence(cls, count)
        cum = np.concatenate(([0.0], np.cumsum(np.log(np.array(seq, dtype=float)))))
        if cum[-2] > target:
            break
        count *= 2
    prods = [1]
    for p in seq:
        prods.append(prods[-1] * p)

    mp = mpmath.mp
    mp.dps = _MP_DPS

    def primorial_below(r: int, n: int) -> bool:
        # sequence primorial P_r < m-limit(n)
        def exact() -> bool:
            lim = mpmath.power(n, mpmath.mpf(alpha))
            if widen:
                lim *= mpmath.power(k, 3 - mpmath.mpf(epsilon))
            return prods[r] < lim
        return log_less(float(cum[r]), log_mlimit(n), exact)

    def holds(q: int, n: int) -> bool:
        if epsilon is None:
            return log_less(k_exp * math.log(q), math.log(n), lambda: q ** k_exp < n)
        e = mpmath.mpf(epsilon)
        t = (2 - e) / e
        lhs = (1 / epsilon) * math.log(2) + ((2 - epsilon) / epsilon) * (
            math.log(q) + (log_k if cls.constrained else 0.0))

        def exact() -> bool:
            val = mpmath.power(2, 1 / e) * mpmath.power(q, t)
            if cls.constrained:
                val *= mpmath.power(k, t)
            return val < n
        return log_less(lhs, math.log(n), exact)

    violations = []
    r = -1  # largest r with P_r below the limit; monotone in n
    for n in range(2, n_bound + 1):
        while r + 1 < len(prods) - 1 and primorial_below(r + 1, n):
            r += 1
        if r < 0:
            continue  # no positive m in range
        if not holds(seq[r], n):
            violations.append(n)
    params = {"k_exp": k_exp, "alpha": alpha, "epsilon": epsilon, "k": cls.k, "l": cls.l}
    return ThresholdReport(params, _constant_from(violations, 2), 2, n_bound, violations)


# ---------------------------------------------------------------------------
# Euclid-style generation and coprime existence
# ---------------------------------------------------------------------------

def euclid_generate(count: int) -> List[int]:
    """Each term is the least b > 1 coprime to the product of the previous terms.

    The product is kept as the set of its prime factors.  Adding a term only
    shrinks the set of admissible b, so the search resumes past the last term.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out: List[int] = []
    b = 2
    while len(out) < count:
        if all(b % p for p in out):
            out.append(b)
        b += 1
    return out


def least_coprime_witness(a: int) -> Optional[int]:
    """Least b with 1 < b < a and gcd(a, b) = 1, or None."""
    for b in range(2, a):
        if math.gcd(a, b) == 1:
            return b
    return None


def theorem5_construction(m: int) -> int:
    """Coprime k in (1, m) for m >= 15, built from 3, 5, 2 or the
    2 + 3h / 2 + 3h + 3t pair when 30 | m."""
    if m < 15:
        raise ValueError("construction needs m >= 15")
    if m % 3:
        return 3
    if m % 5:
        return 5
    t = m // 15
    if t % 2:
        return 2
    d = t
    while d % 3 == 0:
        d //= 3
    r = 2
    while math.gcd(r, 3 * t) != 1:
        r += 1
    h = (r - 2) * pow(3, -1, d) % d
    first = 2 + 3 * h
    return first if math.gcd(first, m) == 1 else first + 3 * t


@dataclass
class CoprimeScanRecord:
    a: int
    witness: Optional[int]
    construction: Optional[int]
    verdict: str


def coprime_record(a: int) -> CoprimeScanRecord:
    b = least_coprime_witness(a)
    c = theorem5_construction(a) if a >= 15 else None
    ok = b is not None
    if c is not None:
        ok = ok and 1 < c < a and math.gcd(a, c) == 1
    return CoprimeScanRecord(a, b, c, "ok" if ok else "violation")


@dataclass
class CoprimeScanReport:
    records: List[CoprimeScanRecord]

    @property
    def violations(self) -> List[int]:
        return [r.a for r in self.records if r.verdict != "ok"]

    @property
    def small_range_ok(self) -> bool:
        return all(r.verdict == "ok" for r in self.records if r.a < 15)

    @property
    def large_range_ok(self) -> bool:
        return all(r.verdict == "ok" for r in self.records if r.a >= 15)


def coprime_existence_scan(a_bound: int) -> CoprimeScanReport:
    if a_bound < 3:
        raise ValueError("a_bound must be >= 3")
    return CoprimeScanReport([coprime_record(a) for a in range(3, a_bound + 1)])
