"""Exact Genocchi, Euler and Bernoulli numbers.

This is the big-integer oracle every mod-p kernel is checked against. All
sequences come from recurrences derived from their generating functions
(see docs/DERIVATIONS.md); binomial coefficients are carried as one Pascal
row that is advanced in place of recomputing factorials.
"""

import json
import logging
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import List

import sympy

from src.errors import DomainError, InvariantError
from src.schemas import ExactSequence, SequenceKind

logger = logging.getLogger(__name__)


def _advance(row: List[int]) -> List[int]:
    """Pascal row n -> row n + 1."""
    return [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]


def _check_bound(N: int) -> None:
    if N < 0:
        raise DomainError(f"index bound must be >= 0, got {N}")


@lru_cache(maxsize=16)
def genocchi_exact(N: int) -> ExactSequence:
    """G_0..G_N from 2 G_n = -sum_{k=1}^{n-1} C(n, k) G_k (n >= 2)."""
    _check_bound(N)
    values = [0, 1][:N + 1]
    row = [1, 1]
    for n in range(2, N + 1):
        row = _advance(row)
        total = sum(row[k] * values[k] for k in range(1, n) if values[k])
        if total % 2:
            raise InvariantError(f"odd Genocchi recurrence sum at n={n}")
        values.append(-total // 2)

    for n in range(3, N + 1, 2):
        if values[n]:
            raise InvariantError(f"G_{n} should vanish")
    for n in range(2, N + 1, 2):
        signed = values[n] if (n // 2) % 2 == 0 else -values[n]
        if signed <= 0 or signed % 2 == 0:
            raise InvariantError(f"(-1)^{n // 2} G_{n} is not an odd positive integer")

    return ExactSequence(kind=SequenceKind.GENOCCHI, values=tuple(values))


@lru_cache(maxsize=16)
def euler_exact(N: int) -> ExactSequence:
    """E_0..E_N from sum_{k=0}^{n} C(2n, 2k) E_2k = 0 (n >= 1)."""
    _check_bound(N)
    values = [0] * (N + 1)
    values[0] = 1
    row = [1]
    for n in range(1, N // 2 + 1):
        row = _advance(_advance(row))
        values[2 * n] = -sum(row[2 * k] * values[2 * k] for k in range(n))
    return ExactSequence(kind=SequenceKind.EULER, values=tuple(values))


def staudt_clausen_denominator(m: int) -> int:
    """Product of the primes q with (q - 1) | m, for even m >= 2."""
    denominator = 1
    for divisor in sympy.divisors(m):
        if sympy.isprime(divisor + 1):
            denominator *= divisor + 1
    return denominator


@lru_cache(maxsize=16)
def bernoulli_exact(N: int) -> ExactSequence:
    """B_0..B_N from sum_{k=0}^{m} C(m+1, k) B_k = 0 (m >= 1), so B_1 = -1/2."""
    _check_bound(N)
    values = [Fraction(1)]
    row = [1, 1]
    for m in range(1, N + 1):
        row = _advance(row)
        if m > 1 and m % 2:
            values.append(Fraction(0))
            continue
        total = sum((row[k] * values[k] for k in range(m) if values[k]), Fraction(0))
        values.append(-total / (m + 1))

    for m in range(2, N + 1, 2):
        expected = staudt_clausen_denominator(m)
        if values[m].denominator != expected:
            raise InvariantError(
                f"denominator of B_{m} is {values[m].denominator}, von Staudt-Clausen gives {expected}"
            )

    return ExactSequence(kind=SequenceKind.BERNOULLI, values=tuple(values))


def euler_poly_at_zero(n: int) -> Fraction:
    """E_n(0) = G_{n+1} / (n + 1)."""
    _check_bound(n)
    return Fraction(genocchi_exact(n + 1)[n + 1], n + 1)


def euler_poly_at_zero_exact(N: int) -> ExactSequence:
    """E_0(0)..E_N(0) from a single Genocchi pass."""
    _check_bound(N)
    genocchi = genocchi_exact(N + 1)
    values = tuple(Fraction(genocchi[n + 1], n + 1) for n in range(N + 1))
    return ExactSequence(kind=SequenceKind.EULER_POLY_AT_ZERO, values=values)


def dump_jsonl(sequence: ExactSequence, path: Path) -> Path:
    """Write one {"index", "value"} object per line, values as decimal strings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as stream:
        for index, value in enumerate(sequence.values):
            stream.write(json.dumps({"index": index, "value": str(value)}) + "\n")
    logger.info(f"{sequence.kind.value} snapshot written: {path} ({len(sequence)} values)")
    return path


def load_jsonl(path: Path, kind: SequenceKind) -> ExactSequence:
    """Read a snapshot written by dump_jsonl."""
    integral = kind in (SequenceKind.GENOCCHI, SequenceKind.EULER)
    values = []
    with Path(path).open("r", encoding="utf-8") as stream:
        for expected, line in enumerate(stream):
            entry = json.loads(line)
            if entry["index"] != expected:
                raise ValueError(f"snapshot {path} skips index {expected}")
            values.append(int(entry["value"]) if integral else Fraction(entry["value"]))
    return ExactSequence(kind=kind, values=tuple(values))
