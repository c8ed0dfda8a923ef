"""Admissible systems of linear forms, the F1/F2 permutation search, the
coprime-residue matrix check and the CRT least-prime test."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import sieve
from .least_prime import NotFoundWithinBound, class_primes_upto, APClass
from .sieve import CrtClass, NonCoprimeModuli, coprimes_of, crt_merge, is_prime

F1F2_WIDTH = 12
CONJ4_CAP_MULTIPLE = 8


@dataclass(frozen=True)
class LinearForm:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 0:
            raise ValueError(f"need a >= 1, b >= 0, got ({self.a}, {self.b})")

    def __call__(self, x: int) -> int:
        return self.a * x + self.b

    def __str__(self):
        return f"{self.a}x+{self.b}"


@dataclass(frozen=True)
class LinearSystem:
    forms: Tuple[LinearForm, ...]

    def __post_init__(self):
        if not self.forms:
            raise ValueError("a system needs at least one form")
        if len(set(self.forms)) != len(self.forms):
            raise ValueError("forms must be distinct")

    @classmethod
    def of(cls, pairs: Iterable[Tuple[int, int]]) -> "LinearSystem":
        return cls(tuple(LinearForm(a, b) for a, b in pairs))

    @classmethod
    def parse(cls, text: str) -> "LinearSystem":
        """'a,b;a,b;...' -> system."""
        pairs = []
        for chunk in text.replace(" ", "").split(";"):
            if chunk:
                a, b = chunk.split(",")
                pairs.append((int(a), int(b)))
        return cls.of(pairs)

    def __len__(self):
        return len(self.forms)

    def __str__(self):
        return ";".join(f"{f.a},{f.b}" for f in self.forms)


@dataclass(frozen=True)
class Verdict:
    admissible: bool
    blocking_prime: Optional[int] = None
    cause: Optional[str] = None


def _killed_residues(forms: Sequence[LinearForm], p: int) -> Set[int]:
    """Residues x mod p at which some form vanishes mod p."""
    killed: Set[int] = set()
    for f in forms:
        a, b = f.a % p, f.b % p
        if a == 0:
            if b == 0:
                return set(range(p))
            continue
        killed.add(-b * pow(a, -1, p) % p)
    return killed


def _candidate_primes(forms: Sequence[LinearForm]) -> List[int]:
    # a prime p > m not dividing any a_i leaves p - m > 0 residues alive
    cands = set(sieve.primes_in_range(2, max(len(forms), 2)).tolist())
    for f in forms:
        cands.update(sieve.factorize(f.a))
    return sorted(cands)


def admissible_check(system: LinearSystem) -> Verdict:
    """Admissible iff no prime divides the product of the forms at every x."""
    for f in system.forms:
        g = math.gcd(f.a, f.b)
        if g > 1:
            return Verdict(False, sieve.factorize(g)[0], f"degenerate-form {f}")
    for p in _candidate_primes(system.forms):
        if len(_killed_residues(system.forms, p)) == p:
            return Verdict(False, p, f"every residue mod {p} is covered")
    return Verdict(True)


# ---------------------------------------------------------------------------
# F1 / F2 permutation search
# ---------------------------------------------------------------------------

class WidthExceeded(ValueError):
    pass


def f1f2_systems(n: int, perm: Sequence[int]) -> Tuple[LinearSystem, LinearSystem]:
    bs = coprimes_of(n)
    f1 = LinearSystem.of(zip(perm, bs))
    f2 = LinearSystem.of(((a * n, b) for a, b in zip(perm, bs)))
    return f1, f2


def f1f2_search(n: int, width: int = F1F2_WIDTH) -> Optional[Tuple[int, ...]]:
    """First permutation (lexicographic) of 1..phi(n) making both F1 = {a_i x + b_i}
    and F2 = {a_i n x + b_i} admissible; None when the search is exhausted.

    Backtracks over positions, pruning as soon as a partial system covers every
    residue modulo some relevant prime (coverage only grows with more forms).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    bs = coprimes_of(n)
    phi = len(bs)
    if phi > width:
        raise WidthExceeded(f"phi({n}) = {phi} exceeds search width {width}")
    # F1: primes <= phi or dividing some a_i <= phi; F2: also primes dividing n,
    # which never vanish there since gcd(b_i, n) = 1
    primes = sieve.primes_in_range(2, max(phi, 2)).tolist()

    killed1: Dict[int, List[int]] = {p: [0] * p for p in primes}
    killed2: Dict[int, List[int]] = {p: [0] * p for p in primes}
    alive1 = {p: p for p in primes}
    alive2 = {p: p for p in primes}
    used = [False] * (phi + 1)
    perm: List[int] = []

    def residues_hit(a: int, b: int, p: int) -> Optional[List[int]]:
        a %= p
        b %= p
        if a == 0:
            return None if b == 0 else []
        return [-b * pow(a, -1, p) % p]

    def apply(killed, alive, a, b, sign) -> bool:
        ok = True
        for p in primes:
            hit = residues_hit(a, b, p)
            rs = range(p) if hit is None else hit
            for r in rs:
                if sign > 0:
                    killed[p][r] += 1
                    if killed[p][r] == 1:
                        alive[p] -= 1
                else:
                    killed[p][r] -= 1
                    if killed[p][r] == 0:
                        alive[p] += 1
            if alive[p] == 0:
                ok = False
        return ok

    def place(i: int) -> bool:
        if i == phi:
            return True
        b = bs[i]
        for a in range(1, phi + 1):
            if used[a] or math.gcd(a, b) != 1:
                continue
            ok1 = apply(killed1, alive1, a, b, +1)
            ok2 = apply(killed2, alive2, a * n, b, +1)
            if ok1 and ok2:
                used[a] = True
                perm.append(a)
                if place(i + 1):
                    return True
                perm.pop()
                used[a] = False
            apply(killed1, alive1, a, b, -1)
            apply(killed2, alive2, a * n, b, -1)
        return False

    return tuple(perm) if place(0) else None


# ---------------------------------------------------------------------------
# matrix of reduced residues
# ---------------------------------------------------------------------------

@dataclass
class MatrixReport:
    n: int
    rows_ok: List[bool]
    cols_ok: List[bool]
    row_witnesses: List[Optional[int]]
    col_witnesses: List[Optional[int]]

    @property
    def all_ok(self) -> bool:
        return all(self.rows_ok) and all(self.cols_ok)


def residue_matrix(n: int) -> np.ndarray:
    """Entry (i, j) = a_i + (j+1) n over the reduced residues a_i of n."""
    a = np.array(coprimes_of(n), dtype=np.int64)
    j = np.arange(1, len(a) + 1, dtype=np.int64)
    return a[:, None] + n * j[None, :]


def matrix_prime_check(n: int) -> MatrixReport:
    if n < 2:
        raise ValueError("n must be >= 2")
    phi = sieve.totient(n)
    sieve.check_u64(phi * n * phi, "matrix size")
    m = residue_matrix(n)
    top = int(m.max())
    if top <= sieve.TABLE_MAX:
        prime = sieve.table(top).flags_upto(top)[m]
    else:
        prime = np.vectorize(is_prime)(m)

    def firsts(mask: np.ndarray, vals: np.ndarray) -> List[Optional[int]]:
        out = []
        for row, vrow in zip(mask, vals):
            idx = np.flatnonzero(row)
            out.append(int(vrow[idx[0]]) if len(idx) else None)
        return out

    rows = firsts(prime, m)
    cols = firsts(prime.T, m.T)
    return MatrixReport(n, [w is not None for w in rows], [w is not None for w in cols],
                        rows, cols)


# ---------------------------------------------------------------------------
# least prime in a CRT-merged class
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Conj4Record:
    k: int
    l: int
    d: int
    a: int
    epsilon: float
    residue: int
    modulus: int
    q: Optional[int]
    bound: float
    within_bound: bool

    @property
    def verdict(self) -> str:
        if self.q is None:
            return "undecided"
        return "ok" if self.within_bound else "violation"


def _conj4_validate(k: int, l: int, d: int, epsilon: float) -> None:
    APClass(k, l)
    if k < 2:
        raise ValueError("k must be >= 2")
    if d < 2:
        raise ValueError("d must be >= 2")
    if math.gcd(d, k) != 1:
        raise NonCoprimeModuli(f"gcd(d, k) = gcd({d}, {k}) != 1")
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")


def conjecture4_bound(d: int, k: int, epsilon: float) -> float:
    return float(d * k) ** (2 - epsilon)


def conjecture4_least_prime(k: int, l: int, d: int, a: int, epsilon: float,
                            cap_multiple: int = CONJ4_CAP_MULTIPLE) -> Conj4Record:
    """Least prime q = a (mod d), q = l (mod k), compared with (dk)^(2-eps).

    Searches up to cap_multiple times the bound; nothing found there is
    reported as undecided (q is None), never as a violation.
    """
    _conj4_validate(k, l, d, epsilon)
    if not 1 <= a < d or math.gcd(a, d) != 1:
        raise ValueError(f"need 1 <= a < d with gcd(a, d) = 1, got a={a}, d={d}")
    merged = crt_merge(CrtClass(a, d), CrtClass(l, k))
    bound = conjecture4_bound(d, k, epsilon)
    cap = int(cap_multiple * bound)
    v = merged.residue
    while v <= cap:
        if is_prime(v):
            return Conj4Record(k, l, d, a, epsilon, merged.residue, merged.modulus,
                               v, bound, v < bound)
        v += merged.modulus
    return Conj4Record(k, l, d, a, epsilon, merged.residue, merged.modulus,
                       None, bound, False)


@dataclass
class Conj4Sweep:
    """Every reduced a mod d at once for fixed (k, l, d)."""
    k: int
    l: int
    d: int
    epsilon: float
    bound: float
    worst_a: Optional[int]
    worst_q: Optional[int]
    classes: int
    uncovered: List[int]

    @property
    def verdict(self) -> str:
        if self.uncovered:
            return "undecided"
        return "ok" if self.worst_q < self.bound else "violation"


def conjecture4_sweep(k: int, l: int, d: int, epsilon: float,
                      cap_multiple: int = CONJ4_CAP_MULTIPLE) -> Conj4Sweep:
    """Streams primes = l (mod k) and records the first one in each class
    a mod d; the last class reached gives the worst case."""
    _conj4_validate(k, l, d, epsilon)
    bound = conjecture4_bound(d, k, epsilon)
    cap = int(cap_multiple * bound)
    reduced = np.gcd(np.arange(d), d) == 1
    reduced[0] = False
    sentinel = np.iinfo(np.int64).max
    first = np.full(d, sentinel, dtype=np.int64)
    hi = min(cap, max(4096, 4 * d * k))
    lo = 0
    cls = APClass(k, l)
    while True:
        qs = class_primes_upto(cls, hi)
        qs = qs[qs >= lo]
        if len(qs):
            np.minimum.at(first, qs % d, qs)
        hits = first[reduced]
        if hits.max() != sentinel or hi >= cap:
            break
        lo, hi = hi + 1, min(2 * hi, cap)
    a_vals = np.flatnonzero(reduced)
    uncovered = a_vals[hits == sentinel].tolist()
    if uncovered:
        return Conj4Sweep(k, l, d, epsilon, bound, None, None, len(a_vals), uncovered)
    i = int(np.argmax(hits))
    return Conj4Sweep(k, l, d, epsilon, bound, int(a_vals[i]), int(hits[i]),
                      len(a_vals), [])


# ---------------------------------------------------------------------------
# standard prime maps
# ---------------------------------------------------------------------------

def standard_prime_map_check(system: LinearSystem) -> bool:
    """Every form takes a prime value at x = 1."""
    return all(is_prime(f(1)) for f in system.forms)


def least_standard_offset(a: int) -> Optional[int]:
    """Least positive b < a with a + b prime (exists for a > 1 by Bertrand)."""
    if a < 2:
        raise ValueError("a must be > 1")
    for b in range(1, a):
        if is_prime(a + b):
            return b
    return None
