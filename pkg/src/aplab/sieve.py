"""Exact prime machinery shared by every scan.

Segmented odd-only sieve, deterministic 64-bit Miller-Rabin, prime counting,
primorials, CRT merging and log-space threshold comparisons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional

import numpy as np

U64_MAX = (1 << 64) - 1
DEFAULT_SEGMENT = 1 << 18
DEFAULT_CEILING = 1 << 42
# values up to this are answered from one cached flag table
TABLE_MAX = 1 << 25
LOG_GUARD = 1e-6

# complete for n < 3.3e24, so for every 64-bit value
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_ceiling = DEFAULT_CEILING


class RangeTooLarge(ValueError):
    pass


class Overflow64(ArithmeticError):
    pass


class NonCoprimeModuli(ValueError):
    pass


def set_ceiling(value: int) -> None:
    global _ceiling
    if value < 2:
        raise ValueError("sieve ceiling must be >= 2")
    _ceiling = int(value)


def get_ceiling() -> int:
    return _ceiling


def check_u64(v: int, what: str = "value") -> int:
    if v < 0 or v > U64_MAX:
        raise Overflow64(f"{what} {v} outside 64-bit unsigned range")
    return v


# ---------------------------------------------------------------------------
# sieving
# ---------------------------------------------------------------------------

def _base_primes(n: int) -> np.ndarray:
    """Odd primes <= n, plain sieve (n is at most a square root)."""
    if n < 3:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n // 2 + 1, dtype=bool)  # index i <-> 2i+1
    flags[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if flags[i]:
            p = 2 * i + 1
            flags[p * p // 2::p] = False
    odd = 2 * np.flatnonzero(flags) + 1
    return odd[odd <= n].astype(np.int64)


def _mark_odd_window(flags: np.ndarray, lo: int, base: np.ndarray) -> None:
    """Clear composite flags in place; flags[i] stands for lo + 2i, lo odd."""
    hi = lo + 2 * (len(flags) - 1)
    for p in base.tolist():
        pp = p * p
        if pp > hi:
            break
        start = max(pp, (lo + p - 1) // p * p)
        if start % 2 == 0:
            start += p
        if start > hi:
            continue
        flags[(start - lo) // 2::p] = False


def _odd_window_primes(lo: int, hi: int, base: np.ndarray,
                       segment_size: int) -> Iterator[np.ndarray]:
    """Primes in [lo, hi] excluding 2, one array per segment."""
    lo = max(lo, 3)
    if lo % 2 == 0:
        lo += 1
    while lo <= hi:
        seg_hi = min(hi, lo + 2 * (segment_size - 1))
        flags = np.ones((seg_hi - lo) // 2 + 1, dtype=bool)
        _mark_odd_window(flags, lo, base)
        yield lo + 2 * np.flatnonzero(flags).astype(np.int64)
        lo = seg_hi + 2


class PrimeTable:
    """Odd-only primality flags for 0..limit, built segment by segment.

    Immutable once constructed; share freely between readers.
    """

    def __init__(self, limit: int, segment_size: int = DEFAULT_SEGMENT):
        if limit < 2:
            limit = 2
        if segment_size < 1:
            raise ValueError("segment_size must be positive")
        self.limit = int(limit)
        self.segment_size = int(segment_size)
        flags = np.ones(self.limit // 2 + 1, dtype=bool)  # i <-> 2i+1
        flags[0] = False
        base = _base_primes(math.isqrt(self.limit))
        for start in range(1, len(flags), self.segment_size):
            stop = min(len(flags), start + self.segment_size)
            _mark_odd_window(flags[start:stop], 2 * start + 1, base)
        if 2 * (len(flags) - 1) + 1 > self.limit:
            flags[-1] = False
        self._flags = flags
        self._flags.setflags(write=False)
        odd = 2 * np.flatnonzero(flags).astype(np.int64) + 1
        self.primes = np.concatenate((np.array([2], dtype=np.int64), odd))
        self.primes.setflags(write=False)

    def __contains__(self, v: int) -> bool:
        return self.is_prime(v)

    def __len__(self) -> int:
        return len(self.primes)

    def is_prime(self, v: int) -> bool:
        if v > self.limit:
            raise RangeTooLarge(f"{v} exceeds table limit {self.limit}")
        if v < 2:
            return False
        if v % 2 == 0:
            return v == 2
        return bool(self._flags[v // 2])

    def flags_upto(self, n: int) -> np.ndarray:
        """Boolean primality array for 0..n (n <= limit)."""
        if n > self.limit:
            raise RangeTooLarge(f"{n} exceeds table limit {self.limit}")
        out = np.zeros(n + 1, dtype=bool)
        ps = self.primes[: self.count(n)]
        out[ps] = True
        return out

    def count(self, x: int) -> int:
        if x > self.limit:
            raise RangeTooLarge(f"{x} exceeds table limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def range(self, lo: int, hi: int) -> np.ndarray:
        a = np.searchsorted(self.primes, lo, side="left")
        b = np.searchsorted(self.primes, min(hi, self.limit), side="right")
        return self.primes[a:b]


_table: Optional[PrimeTable] = None


def table(limit: int = 1 << 16) -> PrimeTable:
    """Process-wide table covering at least `limit` (grows by doubling)."""
    global _table
    if limit > TABLE_MAX:
        raise RangeTooLarge(f"table limit {limit} above {TABLE_MAX}")
    if _table is None or _table.limit < limit:
        size = max(limit, 1 << 16)
        if _table is not None:
            size = max(size, min(2 * _table.limit, TABLE_MAX))
        _table = PrimeTable(size)
    return _table


def primes_in_range(lo: int, hi: int) -> np.ndarray:
    """All primes p with lo <= p <= hi, ascending (int64 array)."""
    if lo > hi:
        raise ValueError(f"empty interval: lo={lo} > hi={hi}")
    if hi > _ceiling:
        raise RangeTooLarge(f"hi={hi} exceeds sieve ceiling {_ceiling}")
    if hi <= TABLE_MAX:
        return table(hi).range(lo, hi)
    parts = [table(TABLE_MAX).range(lo, TABLE_MAX)] if lo <= TABLE_MAX else []
    base = _base_primes(math.isqrt(hi))
    parts.extend(_odd_window_primes(max(lo, TABLE_MAX + 1), hi, base,
                                    DEFAULT_SEGMENT))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def iter_prime_windows(start: int = 0, width: int = 1 << 16) -> Iterator[np.ndarray]:
    """Endless stream of ascending prime blocks starting at `start`."""
    lo = start
    while True:
        hi = lo + width - 1
        yield primes_in_range(lo, hi)
        lo = hi + 1
        width = min(width * 2, 1 << 24)


def prime_count(x: int) -> int:
    if x < 2:
        return 0
    if x <= TABLE_MAX:
        return table(x).count(x)
    total = table(TABLE_MAX).count(TABLE_MAX)
    if x > _ceiling:
        raise RangeTooLarge(f"x={x} exceeds sieve ceiling {_ceiling}")
    base = _base_primes(math.isqrt(x))
    for seg in _odd_window_primes(TABLE_MAX + 1, x, base, DEFAULT_SEGMENT):
        total += len(seg)
    return total


def first_primes(n: int) -> np.ndarray:
    """The first n primes."""
    limit = 1 << 16
    while True:
        t = table(limit)
        if len(t) >= n:
            return t.primes[:n]
        if t.limit >= TABLE_MAX:
            raise RangeTooLarge(f"more than {len(t)} primes requested")
        limit = min(t.limit * 4, TABLE_MAX)


def nth_prime(n: int) -> int:
    """The n-th prime, 1-based."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return int(first_primes(n)[-1])


# ---------------------------------------------------------------------------
# primality and factoring
# ---------------------------------------------------------------------------

def _mr_round(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def miller_rabin(n: int) -> bool:
    """Deterministic for every n < 2**64."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    return all(_mr_round(n, a, d, s) for a in _MR_BASES)


def is_prime(v: int) -> bool:
    check_u64(v)
    if _table is not None and v <= _table.limit:
        return _table.is_prime(v)
    if v <= 1 << 16:
        return table(1 << 16).is_prime(v)
    return miller_rabin(v)


def factorize(v: int) -> List[int]:
    """Distinct prime factors of v, ascending."""
    check_u64(v)
    if v < 2:
        return []
    out = []
    root = math.isqrt(v)
    if root <= TABLE_MAX:
        trial = table(max(root, 2)).range(2, root).tolist()
    else:
        trial = primes_in_range(2, root).tolist()
    for p in trial:
        if p * p > v:
            break
        if v % p == 0:
            out.append(p)
            while v % p == 0:
                v //= p
    if v > 1:
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# primorials, gcd, CRT
# ---------------------------------------------------------------------------

def primorial_log(n: int) -> float:
    """Natural log of p_1 * ... * p_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.fsum(math.log(p) for p in first_primes(n).tolist())


def primorial_exact(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    prod = 1
    for p in first_primes(n).tolist():
        prod *= p
        if prod > U64_MAX:
            raise Overflow64(f"primorial of first {n} primes exceeds 64 bits")
    return prod


@dataclass(frozen=True)
class CrtClass:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        check_u64(self.modulus, "modulus")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} not in [0, {self.modulus})")

    @classmethod
    def of(cls, residue: int, modulus: int) -> "CrtClass":
        return cls(residue % modulus, modulus)


def crt_merge(c1: CrtClass, c2: CrtClass) -> CrtClass:
    m1, m2 = c1.modulus, c2.modulus
    if math.gcd(m1, m2) != 1:
        raise NonCoprimeModuli(f"gcd({m1}, {m2}) = {math.gcd(m1, m2)}")
    m = m1 * m2
    check_u64(m, "merged modulus")
    t = (c2.residue - c1.residue) * pow(m1, -1, m2) % m2
    return CrtClass(c1.residue + m1 * t, m)


def coprimes_of(n: int) -> List[int]:
    if n < 1:
        raise ValueError("n must be >= 1")
    return [a for a in range(1, n + 1) if math.gcd(a, n) == 1]


def totient(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


# ---------------------------------------------------------------------------
# guarded log-space comparisons
# ---------------------------------------------------------------------------

def log_less(lhs_log: float, rhs_log: float, exact: Callable[[], bool]) -> bool:
    """lhs < rhs given natural logs; defers to `exact` inside the guard band."""
    if abs(lhs_log - rhs_log) < LOG_GUARD:
        return bool(exact())
    return lhs_log < rhs_log


def log_less_vec(lhs_log: np.ndarray, rhs_log: np.ndarray,
                 exact: Callable[[int], bool]) -> np.ndarray:
    """Vectorised `log_less`; `exact(i)` decides element i near the boundary."""
    out = lhs_log < rhs_log
    for i in np.flatnonzero(np.abs(lhs_log - rhs_log) < LOG_GUARD).tolist():
        out[i] = bool(exact(i))
    return out
