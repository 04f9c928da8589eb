"""Residues of B_2k, E_2k and G_2k modulo p for every index 0 <= 2k <= p - 3.

The all-indices kernels work on even power series in x = t^2 over the
integers mod p (docs/DERIVATIONS.md):

    cosh(t) / (sinh(t)/t) = t coth t = sum 4^k B_2k x^k / (2k)!
    1 / cosh(t)                      = sum E_2k x^k / (2k)!

Both reduce to one series reciprocal and at most one product, carried out
by the NTT engine in src.ntt.
"""

import logging
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from numba import njit

from src.errors import DomainError, ResourceLimitError
from src.modarith import FactorSieve, fermat_quotient_2, prime_modulus
from src.ntt import MAX_MODULUS, convolve_mod, series_inverse_mod
from src.schemas import ModSeries, PrimeModulus, SeriesKind

logger = logging.getLogger(__name__)

PrimeLike = Union[int, PrimeModulus]

SNAPSHOT_MAGIC = b"GIRRMS01"
_SNAPSHOT_HEADER = struct.Struct("<8sQBI")
_KIND_CODES = {SeriesKind.BERNOULLI: 0, SeriesKind.EULER: 1, SeriesKind.GENOCCHI: 2}


@njit(cache=True)
def _factorial_tables(p):
    """i! and 1/i! mod p for 0 <= i <= p - 1, using (p-1)! = -1."""
    fact = np.empty(p, dtype=np.int64)
    inv_fact = np.empty(p, dtype=np.int64)
    fact[0] = 1
    for i in range(1, p):
        fact[i] = fact[i - 1] * i % p
    inv_fact[p - 1] = p - 1
    for i in range(p - 1, 0, -1):
        inv_fact[i - 1] = inv_fact[i] * i % p
    return fact, inv_fact


@njit(cache=True)
def _power_table(base, count, p):
    out = np.empty(count, dtype=np.int64)
    acc = 1
    for k in range(count):
        out[k] = acc
        acc = acc * base % p
    return out


@njit(cache=True)
def _pow_mod(base, exp, p):
    result = 1
    base %= p
    while exp > 0:
        if exp & 1:
            result = result * base % p
        base = base * base % p
        exp >>= 1
    return result


@njit(cache=True)
def _voronoi_sum(p, m, g):
    """sum_{j=1}^{p-1} j^(m-1) floor(g j / p) mod p."""
    total = 0
    for j in range(1, p):
        total = (total + _pow_mod(j, m - 1, p) * ((g * j) // p)) % p
    return total


def _series_prime(p: PrimeLike, sieve: Optional[FactorSieve]) -> Tuple[int, int]:
    modulus = prime_modulus(p, sieve)
    if modulus.p >= MAX_MODULUS:
        raise ResourceLimitError(f"p={modulus.p} exceeds the series kernel limit 2^25")
    return modulus.p, 0 if modulus.p == 3 else (modulus.p - 1) // 2


def _empty(p: int, kind: SeriesKind) -> ModSeries:
    return ModSeries(p=p, kind=kind, residues=np.zeros(0, dtype=np.int64))


def bernoulli_all_mod_p(p: PrimeLike, sieve: Optional[FactorSieve] = None) -> ModSeries:
    """B_0, B_2, ..., B_{p-3} mod p in O(p log p) word operations.

    Args:
        p: Odd prime below 2^25
        sieve: Optional sieve used for the primality check

    Returns:
        ModSeries whose slot k holds B_2k mod p
    """
    q, n = _series_prime(p, sieve)
    if n == 0:
        return _empty(q, SeriesKind.BERNOULLI)
    fact, inv_fact = _factorial_tables(q)
    sinh_over_t = inv_fact[1:2 * n:2]
    cosh = inv_fact[0:2 * n:2]
    coth = convolve_mod(series_inverse_mod(sinh_over_t, n, q), cosh, q)[:n]
    inv_four_powers = _power_table(pow(4, q - 2, q), n, q)
    residues = coth * fact[0:2 * n:2] % q * inv_four_powers % q
    return ModSeries(p=q, kind=SeriesKind.BERNOULLI, residues=residues)


def euler_all_mod_p(p: PrimeLike, sieve: Optional[FactorSieve] = None) -> ModSeries:
    """E_0, E_2, ..., E_{p-3} mod p from the reciprocal of the cosh series."""
    q, n = _series_prime(p, sieve)
    if n == 0:
        return _empty(q, SeriesKind.EULER)
    fact, inv_fact = _factorial_tables(q)
    sech = series_inverse_mod(inv_fact[0:2 * n:2], n, q)
    residues = sech * fact[0:2 * n:2] % q
    return ModSeries(p=q, kind=SeriesKind.EULER, residues=residues)


def genocchi_all_mod_p(
    p: PrimeLike,
    sieve: Optional[FactorSieve] = None,
    bernoulli: Optional[ModSeries] = None,
) -> ModSeries:
    """G_2k = 2(1 - 4^k) B_2k mod p, reusing a Bernoulli series when given."""
    if bernoulli is None:
        bernoulli = bernoulli_all_mod_p(p, sieve)
    elif bernoulli.kind != SeriesKind.BERNOULLI or bernoulli.p != int(p):
        raise DomainError(f"expected the Bernoulli series of p={int(p)}")
    q, n = bernoulli.p, len(bernoulli)
    if n == 0:
        return _empty(q, SeriesKind.GENOCCHI)
    factor = 2 * (1 - _power_table(4, n, q)) % q
    residues = factor * bernoulli.residues % q
    return ModSeries(p=q, kind=SeriesKind.GENOCCHI, residues=residues)


def bernoulli_single_mod_p(p: PrimeLike, m: int, sieve: Optional[FactorSieve] = None) -> int:
    """B_m mod p through the Voronoi congruence, O(p) per call.

    (g^m - 1) B_m = m g^(m-1) sum_j j^(m-1) floor(g j / p)  (mod p)

    starting from g = 2 and stepping g while g^m = 1 (mod p).
    """
    modulus = prime_modulus(p, sieve)
    q = modulus.p
    if m % 2 or not 2 <= m <= q - 3:
        raise DomainError(f"index {m} must be even with 2 <= m <= {q - 3}")
    if q >= 1 << 31:
        raise ResourceLimitError(f"p={q} too large for the Voronoi path")
    g = 2
    while pow(g, m, q) == 1:
        g += 1
    total = int(_voronoi_sum(q, m, g))
    numerator = m * pow(g, m - 1, q) * total % q
    return numerator * pow(pow(g, m, q) - 1, q - 2, q) % q


def genocchi_last_mod_p(p: PrimeLike) -> int:
    """G_{p-1} mod p = 2 q_2(p), which sits just past the series range."""
    return 2 * fermat_quotient_2(p) % int(p)


def write_snapshot(series: ModSeries, path: Path) -> Path:
    """Binary dump: magic, p (u64), kind (u8), count (u32), then u32 residues, little-endian."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, series.p, _KIND_CODES[series.kind], len(series))
    with path.open("wb") as stream:
        stream.write(header)
        stream.write(series.residues.astype("<u4").tobytes())
    logger.debug(f"ModSeries snapshot written: {path}")
    return path


def read_snapshot(path: Path) -> ModSeries:
    """Load a snapshot written by write_snapshot."""
    data = Path(path).read_bytes()
    if len(data) < _SNAPSHOT_HEADER.size:
        raise ValueError(f"{path} is too short for a ModSeries snapshot")
    magic, p, code, count = _SNAPSHOT_HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path} is not a ModSeries snapshot")
    kinds = {value: kind for kind, value in _KIND_CODES.items()}
    if code not in kinds:
        raise ValueError(f"unknown series kind code {code}")
    residues = np.frombuffer(data, dtype="<u4", count=count, offset=_SNAPSHOT_HEADER.size)
    return ModSeries(p=p, kind=kinds[code], residues=residues.astype(np.int64))
