"""Goldbach decompositions, plain and inside a residue class, and the
coprimality witnesses behind the necessary condition."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import sieve
from .least_prime import APClass, UNCONSTRAINED, class_primes_upto
from .sieve import CrtClass, crt_merge, is_prime


class NoneFound(LookupError):
    """No decomposition or witness exists; a finding, not a bug."""


class DegenerateInput(ValueError):
    pass


@dataclass(frozen=True)
class GoldbachWitness:
    target: int
    p: int
    q: int
    cls: APClass = UNCONSTRAINED

    def validate(self) -> bool:
        return (self.p + self.q == self.target and self.p < self.q
                and is_prime(self.p) and is_prime(self.q)
                and self.cls.contains(self.p) and self.cls.contains(self.q))


def _decompose(target: int, cls: APClass, first_only: bool) -> List[GoldbachWitness]:
    ps = class_primes_upto(cls, target - 2)
    flags = sieve.table(max(target, 2)).flags_upto(target) if target <= sieve.TABLE_MAX else None
    small = ps[2 * ps < target]
    if flags is not None:
        mates = target - small
        hit = flags[mates] & ((mates % cls.k) == cls.l)
        pairs = [(int(p), int(target - p)) for p in small[hit]]
    else:
        pairs = [(p, target - p) for p in small.tolist()
                 if cls.contains(target - p) and is_prime(target - p)]
    if first_only:
        pairs = pairs[:1]
    return [GoldbachWitness(target, p, q, cls) for p, q in pairs]


def goldbach_decompositions(target: int, mode: str = "all") -> List[GoldbachWitness]:
    """Ways to write `target` as p + q with primes p < q, ascending in p."""
    if target % 2 or target < 8:
        raise ValueError("target must be even and >= 8")
    out = _decompose(target, UNCONSTRAINED, mode == "first")
    if not out:
        raise NoneFound(f"{target} has no distinct-prime decomposition")
    return out


def ap_goldbach_for_target(cls: APClass, target: int, mode: str = "all") -> List[GoldbachWitness]:
    """Decompositions target = p + q, p < q primes, both in the class.

    target must be 2(k w + l) for some w >= 0.
    """
    if target % 2 or target < 4:
        raise ValueError("target must be even")
    if not cls.contains(target // 2):
        raise ValueError(f"target/2 = {target // 2} is not {cls}")
    out = _decompose(target, cls, mode == "first")
    if not out:
        raise NoneFound(f"{target} has no decomposition into two primes {cls}")
    return out


def ap_goldbach_decompositions(cls: APClass, w: int, mode: str = "all") -> List[GoldbachWitness]:
    if w < 0:
        raise ValueError("w must be >= 0")
    value = cls.k * w + cls.l
    sieve.check_u64(2 * value, "target")
    return ap_goldbach_for_target(cls, 2 * value, mode)


# ---------------------------------------------------------------------------
# coprimality witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Conj2Witness:
    n: int
    p_r: int
    difference: int
    fast_path: bool


@dataclass(frozen=True)
class Conj3Witness:
    cls: APClass
    n: int
    q_r: int
    index: int
    difference: int
    fast_path: bool


def _shares_factor_with_sibling(diff: int, total: int, siblings: np.ndarray,
                                own: int) -> bool:
    """Does diff share a prime s with total - x for some sibling x != own?

    s | total - x  <=>  x = total (mod s), one modular pass per prime factor.
    """
    for s in sieve.factorize(diff):
        hit = siblings[(siblings % s) == total % s]
        if np.any(hit != own):
            return True
    return False


def _first_coprime_witness(total: int, siblings: np.ndarray,
                           candidates: np.ndarray) -> Optional[Tuple[int, bool]]:
    for c in candidates.tolist():
        diff = total - c
        if is_prime(diff) and diff > total // 2:
            # a prime difference above half the total cannot divide any other
            # difference total - x (those lie in (total/2, total) too)
            return c, True
        if not _shares_factor_with_sibling(diff, total, siblings, c):
            return c, False
    return None


def odd_primes_below(n: int) -> np.ndarray:
    if n <= 3:
        return np.empty(0, dtype=np.int64)
    return sieve.primes_in_range(3, n - 1)


def conjecture2_witness(n: int) -> Conj2Witness:
    """Smallest odd prime p_r < n, coprime to n, with 2n - p_r coprime to
    2n - p for every other odd prime p < n."""
    if n <= 6:
        raise ValueError("n must be > 6")
    siblings = odd_primes_below(n)
    candidates = siblings[np.gcd(siblings, n) == 1]
    found = _first_coprime_witness(2 * n, siblings, candidates)
    if found is None:
        raise NoneFound(f"no witness for n={n}")
    p, fast = found
    return Conj2Witness(n, p, 2 * n - p, fast)


def validate_conj2_witness(w: Conj2Witness) -> bool:
    """Exhaustive pairwise gcd check, independent of the factor-based search."""
    n, p = w.n, w.p_r
    if p % 2 == 0 or p >= n or not is_prime(p) or math.gcd(p, n) != 1:
        return False
    if w.difference != 2 * n - p:
        return False
    others = [x for x in range(3, n, 2) if x != p and is_prime(x)]
    return all(math.gcd(2 * n - p, 2 * n - x) == 1 for x in others)


@dataclass
class Conj2Record:
    n: int
    witness: Optional[Conj2Witness]

    @property
    def verdict(self) -> str:
        return "witness" if self.witness else "violation"


def conj2_record(n: int) -> Conj2Record:
    try:
        return Conj2Record(n, conjecture2_witness(n))
    except NoneFound:
        return Conj2Record(n, None)


@dataclass
class Conj2ScanReport:
    records: List[Conj2Record]

    @property
    def witnesses(self) -> List[Conj2Witness]:
        return [r.witness for r in self.records if r.witness]

    @property
    def counterexamples(self) -> List[int]:
        return [r.n for r in self.records if r.witness is None]

    @property
    def fast_path_rate(self) -> float:
        ws = self.witnesses
        return sum(w.fast_path for w in ws) / len(ws) if ws else 0.0


def conjecture2_scan(n_from: int, n_to: int) -> Conj2ScanReport:
    if not 6 < n_from <= n_to:
        raise ValueError("need 6 < n_from <= n_to")
    return Conj2ScanReport([conj2_record(n) for n in range(n_from, n_to + 1)])


def conjecture3_witness(cls: APClass, n: int) -> Conj3Witness:
    """Smallest class prime Q_r (r >= 2, Q_r < kn+l, coprime to kn+l) whose
    difference from 2(kn+l) is coprime to every other class-prime difference."""
    if not cls.constrained:
        raise ValueError("the class witness needs k >= 2")
    if n < 0:
        raise ValueError("n must be >= 0")
    value = cls.k * n + cls.l
    total = 2 * value
    sieve.check_u64(total, "target")
    qs = class_primes_upto(cls, value)
    upper = qs[1:]
    upper = upper[upper < value]
    if not len(upper):
        raise DegenerateInput(f"no class prime Q_r with r >= 2 below {value}")
    cand = upper[np.gcd(upper, value) == 1]
    found = _first_coprime_witness(total, qs, cand)
    if found is None:
        raise NoneFound(f"no class witness for {cls}, n={n}")
    q, fast = found
    index = int(np.searchsorted(qs, q)) + 1
    return Conj3Witness(cls, n, q, index, total - q, fast)


def validate_conj3_witness(w: Conj3Witness) -> bool:
    cls = w.cls
    value = cls.k * w.n + cls.l
    total = 2 * value
    members = [v for v in range(cls.l, value + 1, cls.k) if is_prime(v)]
    if w.q_r not in members or members.index(w.q_r) + 1 != w.index or w.index < 2:
        return False
    if not (w.q_r < value and math.gcd(w.q_r, value) == 1):
        return False
    d = total - w.q_r
    return all(math.gcd(d, total - q) == 1 for q in members if q != w.q_r)


# ---------------------------------------------------------------------------
# small-prime witnesses and the Bertrand analogue
# ---------------------------------------------------------------------------

def lemma1_witness(n: int) -> Tuple[int, int]:
    """Lexicographically smallest distinct odd primes p < q < n with gcd(pq, n) = 1."""
    if n <= 6:
        raise ValueError("n must be > 6")
    found = []
    for p in odd_primes_below(n).tolist():
        if n % p:
            found.append(p)
            if len(found) == 2:
                return found[0], found[1]
    raise AssertionError(f"two coprime odd primes below {n} must exist")


def lemma7_witness(cls: APClass, p: int, n: int) -> Tuple[int, int]:
    """Two smallest distinct odd primes <= kn+l, coprime to kn+l, in the class
    and congruent to 2(kn+l) mod p."""
    value = cls.k * n + cls.l
    if p % 2 == 0 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if math.gcd(p, cls.k) != 1:
        raise ValueError(f"gcd(p, k) = gcd({p}, {cls.k}) != 1")
    if math.gcd(p, value) != 1:
        raise ValueError(f"gcd(p, kn+l) = gcd({p}, {value}) != 1")
    merged = crt_merge(CrtClass.of(cls.l, cls.k), CrtClass.of(2 * value, p))
    found = []
    v = merged.residue
    while v <= value:
        if v % 2 and math.gcd(v, value) == 1 and is_prime(v):
            found.append(v)
            if len(found) == 2:
                return found[0], found[1]
        v += merged.modulus
    raise NoneFound(f"fewer than two qualifying primes up to {value}")


@dataclass
class BertrandRecord:
    x: int
    g: int
    prime: Optional[int]

    @property
    def verdict(self) -> str:
        return "ok" if self.prime is not None else "violation"


def bertrand_records(cls: APClass, x_from: int, x_to: int) -> List[BertrandRecord]:
    """For each x, the least class prime strictly inside (g, 2g), g = kx + l."""
    if not cls.constrained:
        raise ValueError("needs k >= 2")
    if x_from < 0 or x_from > x_to:
        raise ValueError("need 0 <= x_from <= x_to")
    g_lo = cls.k * x_from + cls.l
    g_hi = cls.k * x_to + cls.l
    qs = class_primes_upto(cls, 2 * g_hi)
    qs = qs[qs > g_lo]
    xs = np.arange(x_from, x_to + 1, dtype=np.int64)
    gs = cls.k * xs + cls.l
    idx = np.searchsorted(qs, gs, side="right")
    out = []
    for x, g, i in zip(xs.tolist(), gs.tolist(), idx.tolist()):
        q = int(qs[i]) if i < len(qs) and qs[i] < 2 * g else None
        out.append(BertrandRecord(x, g, q))
    return out


def bertrand_ap_check(cls: APClass, x_from: int, x_to: int) -> List[int]:
    """x values whose interval (g, 2g) holds no prime of the class."""
    return [r.x for r in bertrand_records(cls, x_from, x_to) if r.prime is None]
