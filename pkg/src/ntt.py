"""Number-theoretic transform convolution modulo an arbitrary word-size prime.

Residues mod p are lifted to integers in [0, p), convolved exactly modulo
three transform-friendly primes at once (one numpy row per prime) and
recombined with Garner's mixed-radix CRT directly modulo p.
"""

import logging
from functools import lru_cache
from typing import Tuple

import numpy as np
import sympy

from src.config import Config
from src.errors import DomainError, ResourceLimitError

logger = logging.getLogger(__name__)

# q = c * 2^k + 1; the smallest 2-adic valuation bounds the transform length
_NTT_PRIMES: Tuple[int, ...] = (2013265921, 1811939329, 2113929217)
for _q in _NTT_PRIMES:
    assert sympy.isprime(_q), f"{_q} is not prime"
_ROOTS: Tuple[int, ...] = tuple(int(sympy.primitive_root(q)) for q in _NTT_PRIMES)

MAX_LENGTH = 1 << 25
# Coefficients stay below p < MAX_MODULUS, so a length-MAX_LENGTH sum of
# products stays below 2^75, well inside q0*q1*q2 > 2^91.
MAX_MODULUS = 1 << 25
# Schoolbook sums of this many products (< 2^50 each) stay inside int64.
_SCHOOLBOOK_CAP = 1 << 13

_MODULI = np.array(_NTT_PRIMES, dtype=np.int64)
_COLUMN = _MODULI[:, None]
_BLOCK = _MODULI[:, None, None]

_Q0, _Q1, _Q2 = _NTT_PRIMES
_INV_Q0_MOD_Q1 = pow(_Q0, -1, _Q1)
_INV_Q0Q1_MOD_Q2 = pow(_Q0 * _Q1, -1, _Q2)


def _check_modulus(p: int) -> None:
    if p < 2:
        raise DomainError(f"modulus must be >= 2, got {p}")
    if p >= MAX_MODULUS:
        raise ResourceLimitError(f"modulus {p} exceeds the transform capacity 2^25")


@lru_cache(maxsize=32)
def _bit_reversal(size: int) -> np.ndarray:
    bits = size.bit_length() - 1
    index = np.arange(size, dtype=np.int64)
    reversed_index = np.zeros(size, dtype=np.int64)
    for b in range(bits):
        reversed_index |= ((index >> b) & 1) << (bits - 1 - b)
    return reversed_index


def _powers(w: int, count: int, q: int) -> np.ndarray:
    out = np.ones(1, dtype=np.int64)
    step = w
    while out.size < count:
        out = np.concatenate((out, out * step % q))
        step = step * step % q
    return out[:count]


@lru_cache(maxsize=32)
def _twiddles(size: int, inverse: bool) -> np.ndarray:
    """Powers w^j, j < size/2, of a primitive size-th root for each prime."""
    rows = []
    for q, g in zip(_NTT_PRIMES, _ROOTS):
        w = pow(g, (q - 1) // size, q)
        if inverse:
            w = pow(w, q - 2, q)
        rows.append(_powers(w, max(size // 2, 1), q))
    table = np.vstack(rows)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=32)
def _size_inverse(size: int) -> np.ndarray:
    return np.array([pow(size, q - 2, q) for q in _NTT_PRIMES], dtype=np.int64)


def _transform(values: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 transform of a (3, size) array, one prime per row."""
    size = values.shape[1]
    out = values[:, _bit_reversal(size)]
    table = _twiddles(size, inverse)
    length = 2
    while length <= size:
        half = length // 2
        w = table[:, ::size // length][:, :half]
        blocks = out.reshape(3, size // length, length)
        u = blocks[:, :, :half]
        v = blocks[:, :, half:] * w[:, None, :] % _BLOCK
        out = np.concatenate(((u + v) % _BLOCK, (u - v) % _BLOCK), axis=2).reshape(3, size)
        length <<= 1
    if inverse:
        out = out * _size_inverse(size)[:, None] % _COLUMN
    return out


def _lift(a: np.ndarray, size: int) -> np.ndarray:
    rows = np.zeros((3, size), dtype=np.int64)
    rows[:, :a.shape[0]] = a
    return rows


def _garner(residues: np.ndarray, p: int) -> np.ndarray:
    """Recombine (3, n) residues into the exact integers, reduced mod p."""
    r0, r1, r2 = residues
    t1 = (r1 - r0) % _Q1 * _INV_Q0_MOD_Q1 % _Q1
    t2 = ((r2 - r0) % _Q2 - (_Q0 % _Q2) * t1 % _Q2) % _Q2 * _INV_Q0Q1_MOD_Q2 % _Q2
    return (r0 % p + (_Q0 % p) * t1 % p + (_Q0 * _Q1 % p) * t2 % p) % p


def _size_for(length: int) -> int:
    size = 1 << max(length - 1, 0).bit_length()
    if size > MAX_LENGTH:
        raise ResourceLimitError(f"transform length {size} exceeds {MAX_LENGTH}")
    return size


def _schoolbook(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return np.convolve(a, b) % p


def _use_schoolbook(la: int, lb: int) -> bool:
    return min(la, lb) <= min(Config.NTT_THRESHOLD, _SCHOOLBOOK_CAP)


def convolve_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Full linear convolution of two residue vectors modulo p.

    Args:
        a: int64 residues in [0, p)
        b: int64 residues in [0, p)
        p: Modulus, 2 <= p < 2^25

    Returns:
        int64 array of length len(a) + len(b) - 1
    """
    _check_modulus(p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    length = a.size + b.size - 1
    if _use_schoolbook(a.size, b.size):
        return _schoolbook(a, b, p)
    size = _size_for(length)
    spectrum = _transform(_lift(a, size)) * _transform(_lift(b, size)) % _COLUMN
    return _garner(_transform(spectrum, inverse=True)[:, :length], p)


def cyclic_convolve_mod(a: np.ndarray, b: np.ndarray, size: int, p: int) -> np.ndarray:
    """Convolution modulo (x^size - 1, p) for a power-of-two size."""
    _check_modulus(p)
    if size & (size - 1) or size < 1:
        raise DomainError(f"cyclic size must be a power of two, got {size}")
    if size > MAX_LENGTH:
        raise ResourceLimitError(f"transform length {size} exceeds {MAX_LENGTH}")
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size > size or b.size > size:
        raise DomainError("operands longer than the cyclic size")
    if _use_schoolbook(a.size, b.size):
        full = _schoolbook(a, b, p)
        folded = np.zeros(size, dtype=np.int64)
        for start in range(0, full.size, size):
            piece = full[start:start + size]
            folded[:piece.size] += piece
        return folded % p
    spectrum = _transform(_lift(a, size)) * _transform(_lift(b, size)) % _COLUMN
    return _garner(_transform(spectrum, inverse=True), p)


def series_inverse_mod(f: np.ndarray, n: int, p: int) -> np.ndarray:
    """First n coefficients of 1/f over the integers mod a prime p.

    Newton iteration g <- g - g(fg - 1), doubling the precision each round;
    the product fg is taken cyclically at twice the current length, where
    the wrapped part only lands on coefficients already known to match.
    """
    _check_modulus(p)
    f = np.asarray(f, dtype=np.int64)
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    if f.size == 0 or f[0] % p == 0:
        raise DomainError("series is not invertible: constant term vanishes mod p")
    g = np.array([pow(int(f[0]), p - 2, p)], dtype=np.int64)
    m = 1
    while m < n:
        size = 2 * m
        head = f[:size]
        error = cyclic_convolve_mod(head, g, size, p)[m:size]
        correction = cyclic_convolve_mod(g, error, size, p)[:m]
        g = np.concatenate((g, (-correction) % p))
        m = size
    logger.debug(f"series inverse mod {p}: {n} coefficients in {m.bit_length() - 1} rounds")
    return g[:n]
