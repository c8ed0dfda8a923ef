"""Verification lab for least primes in arithmetic progressions and
Goldbach-type coprimality witnesses."""

__version__ = "0.1.0"
