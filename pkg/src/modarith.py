"""Modular arithmetic, sieving, factorization and multiplicative orders."""

import logging
from math import gcd, isqrt
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import sympy

from src.config import Config
from src.errors import DomainError, ResourceLimitError
from src.schemas import OrderReport, PrimeModulus

logger = logging.getLogger(__name__)

Factorization = List[Tuple[int, int]]


def pow_mod(base: int, exp: int, m: int) -> int:
    """Return base**exp mod m in [0, m).

    Python integers are unbounded, so moduli up to 2^62 (p^2 for p < 2^31)
    are exact.
    """
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    if exp < 0:
        raise DomainError(f"exponent must be non-negative, got {exp}")
    return pow(base, exp, m)


def product(values: Iterable[int]) -> int:
    """Product of integers by a balanced tree (fast for primorial-size results)."""
    layer = list(values)
    if not layer:
        return 1
    while len(layer) > 1:
        paired = [layer[i] * layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            paired.append(layer[-1])
        layer = paired
    return layer[0]


class FactorSieve:
    """Smallest-prime-factor table for 0..limit, shared read-only."""

    def __init__(self, limit: int):
        """Build the table.

        Args:
            limit: Largest integer covered (>= 2)
        """
        if limit < 2:
            raise DomainError(f"sieve limit must be >= 2, got {limit}")
        if limit > Config.SIEVE_MAX_LIMIT:
            raise ResourceLimitError(
                f"sieve limit {limit:,} exceeds the memory cap {Config.SIEVE_MAX_LIMIT:,} "
                f"(~{4 * limit / 2**20:.0f} MiB); raise GIRR_SIEVE_MAX_LIMIT to allow it"
            )
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int32)
        for q in range(2, isqrt(limit) + 1):
            if spf[q]:
                continue
            spf[q] = q
            multiples = spf[q * q::q]
            multiples[multiples == 0] = q
        unmarked = np.flatnonzero(spf == 0)
        spf[unmarked] = unmarked
        spf[:2] = 0
        spf.flags.writeable = False
        self.spf = spf
        self._primes = np.flatnonzero(spf[2:] == np.arange(2, limit + 1)) + 2
        logger.debug(f"Sieve built up to {limit:,}: {self._primes.size:,} primes")

    def __getitem__(self, n: int) -> int:
        return int(self.spf[n])

    def is_prime(self, n: int) -> bool:
        if not 0 <= n <= self.limit:
            raise DomainError(f"{n} outside sieve range 0..{self.limit}")
        return n >= 2 and int(self.spf[n]) == n

    def primes(self, lo: int = 2, hi: Optional[int] = None) -> np.ndarray:
        """Primes in [lo, hi] as an int64 array."""
        hi = self.limit if hi is None else hi
        if hi > self.limit:
            raise DomainError(f"bound {hi} beyond sieve limit {self.limit}")
        start = int(np.searchsorted(self._primes, lo, side="left"))
        stop = int(np.searchsorted(self._primes, hi, side="right"))
        return self._primes[start:stop].astype(np.int64)

    def prime_count(self, x: int) -> int:
        """pi(x)."""
        if x > self.limit:
            raise DomainError(f"bound {x} beyond sieve limit {self.limit}")
        return int(np.searchsorted(self._primes, x, side="right"))

    def factorize(self, n: int) -> Factorization:
        factors: Factorization = []
        while n > 1:
            q = int(self.spf[n])
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            factors.append((q, e))
        return factors


def smallest_factor_sieve(limit: int) -> FactorSieve:
    """Table mapping each n <= limit to its smallest prime factor."""
    return FactorSieve(limit)


def factorize(n: int, sieve: Optional[FactorSieve] = None) -> Factorization:
    """Prime factorization of n as increasing (prime, exponent) pairs.

    Uses the sieve when it covers n; otherwise sympy's factorint (trial
    division, then Pollard rho / p-1 with fixed seeds).
    """
    if n < 2:
        raise DomainError(f"cannot factorize {n}")
    if sieve is not None and n <= sieve.limit:
        return sieve.factorize(n)
    return sorted((int(q), int(e)) for q, e in sympy.factorint(n).items())


def is_prime(n: int, sieve: Optional[FactorSieve] = None) -> bool:
    """Deterministic primality: the sieve in range, sympy.isprime beyond."""
    if sieve is not None and 0 <= n <= sieve.limit:
        return sieve.is_prime(n)
    return bool(sympy.isprime(n))


def prime_modulus(p: Union[int, PrimeModulus], sieve: Optional[FactorSieve] = None) -> PrimeModulus:
    """Validate an odd prime and attach the factorization of p - 1."""
    if isinstance(p, PrimeModulus):
        return p
    if p < 3 or p % 2 == 0 or not is_prime(p, sieve):
        raise DomainError(f"{p} is not an odd prime")
    return PrimeModulus(p=p, p_minus_1_factorization=tuple(factorize(p - 1, sieve)))


def multiplicative_order(g: int, p: Union[int, PrimeModulus], sieve: Optional[FactorSieve] = None) -> OrderReport:
    """ord_p(g) by stripping prime factors from p - 1 while the power stays 1."""
    modulus = prime_modulus(p, sieve)
    q_mod = modulus.p
    if gcd(g, q_mod) != 1:
        raise DomainError(f"gcd({g}, {q_mod}) != 1")
    order = q_mod - 1
    for q, e in modulus.p_minus_1_factorization:
        for _ in range(e):
            if pow(g, order // q, q_mod) == 1:
                order //= q
            else:
                break
    return OrderReport(g=g, p=q_mod, order=order)


def ord4_is_half(p: Union[int, PrimeModulus], sieve: Optional[FactorSieve] = None) -> bool:
    """True iff ord_p(4) = (p-1)/2."""
    modulus = prime_modulus(p, sieve)
    return multiplicative_order(4, modulus).order == (modulus.p - 1) // 2


def ord4_from_ord2(ord2: int) -> int:
    """ord_p(4) from ord_p(2): equal when odd, half otherwise."""
    return ord2 if ord2 % 2 else ord2 // 2


def fermat_quotient_2(p: Union[int, PrimeModulus]) -> int:
    """((2^(p-1) - 1)/p) mod p, computed modulo p^2."""
    q = int(p)
    if q < 3 or q % 2 == 0:
        raise DomainError(f"{q} is not an odd prime")
    if q >= 1 << 31:
        raise DomainError(f"p={q} too large: p^2 must stay below 2^62")
    return ((pow_mod(2, q - 1, q * q) - 1) // q) % q


def is_wieferich(p: Union[int, PrimeModulus]) -> bool:
    """2^(p-1) = 1 mod p^2."""
    return fermat_quotient_2(p) == 0
