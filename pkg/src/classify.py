"""Per-prime classification: B-, E- and G-irregularity, Q membership and Wieferich status."""

import logging
from typing import Iterable, List, Optional, Tuple, Union

from numba import njit

from src.errors import DomainError, InvariantError
from src.modarith import (
    FactorSieve,
    is_wieferich,
    multiplicative_order,
    ord4_from_ord2,
    prime_modulus,
)
from src.modpseq import (
    bernoulli_all_mod_p,
    euler_all_mod_p,
    genocchi_all_mod_p,
    genocchi_last_mod_p,
)
from src.schemas import ModSeries, PrimeModulus, PrimeRecord, QClass, SeriesBundle, SeriesKind

logger = logging.getLogger(__name__)

PrimeLike = Union[int, PrimeModulus]

_Q_CLASSES = {3: QClass.Q3, 5: QClass.Q5, 7: QClass.Q7}


@njit(cache=True)
def _product_mod(values, p):
    acc = 1
    for v in values:
        acc = acc * v % p
    return acc


@njit(cache=True)
def _even_double_factorial(p):
    """2 * 4 * ... * (p - 1) mod p."""
    acc = 1
    for k in range(2, p, 2):
        acc = acc * k % p
    return acc


def _orders(modulus: PrimeModulus) -> Tuple[int, bool]:
    ord2 = multiplicative_order(2, modulus).order
    return ord2, ord4_from_ord2(ord2) == (modulus.p - 1) // 2


def h_refined_mod_p(p: PrimeLike, genocchi: ModSeries) -> int:
    """Residue of the refined relative class number mod p.

    (-1)^((p-1)/2) 2^(2-p) / (2*4*...*(p-1)) * G_2 G_4 ... G_{p-3} * G_{p-1}

    Args:
        p: Prime >= 5
        genocchi: Genocchi series of p

    Returns:
        Residue in [0, p); zero exactly when some G factor vanishes
    """
    q = int(p)
    if q < 5:
        raise DomainError(f"refined class number residue needs p >= 5, got {q}")
    if genocchi.kind != SeriesKind.GENOCCHI or genocchi.p != q:
        raise DomainError(f"expected the Genocchi series of p={q}")
    sign = 1 if ((q - 1) // 2) % 2 == 0 else q - 1
    scale = sign * pow(2, 2 - q, q) % q
    scale = scale * pow(int(_even_double_factorial(q)), q - 2, q) % q
    series_part = int(_product_mod(genocchi.residues[1:], q))
    return scale * series_part % q * genocchi_last_mod_p(q) % q


def classify_prime(p: PrimeLike, bundle: SeriesBundle, sieve: Optional[FactorSieve] = None) -> PrimeRecord:
    """Build the PrimeRecord of p from whatever series the bundle carries.

    When both the Genocchi and Bernoulli series are present, G-irregularity
    is taken from the Genocchi zeros and checked against B-irregularity or
    ord_p(4) != (p-1)/2.
    """
    modulus = prime_modulus(p, sieve)
    q = modulus.p
    if bundle.p != q:
        raise DomainError(f"series bundle is for p={bundle.p}, not p={q}")

    ord2, half = _orders(modulus)
    wieferich = is_wieferich(q)

    genocchi = bundle.genocchi
    if genocchi is None and bundle.bernoulli is not None:
        genocchi = genocchi_all_mod_p(q, bernoulli=bundle.bernoulli)

    b_indices = bundle.bernoulli.zero_indices() if bundle.bernoulli is not None else None
    e_indices = bundle.euler.zero_indices() if bundle.euler is not None else None

    g_irregular: Optional[bool] = None
    if b_indices is not None:
        g_irregular = bool(b_indices) or not half
    elif not half:
        g_irregular = True
    if genocchi is not None:
        by_definition = bool(genocchi.zero_indices())
        if g_irregular is not None and by_definition != g_irregular:
            raise InvariantError(
                f"p={q}: Genocchi zeros give {by_definition}, B-irregularity/ord_p(4) give {g_irregular}"
            )
        g_irregular = by_definition

    h_residue = h_refined_mod_p(q, genocchi) if genocchi is not None and q >= 5 else None

    return PrimeRecord(
        p=q,
        residue_mod_8=q % 8,
        ord2=ord2,
        ord4_is_half=half,
        b_irregular_indices=b_indices,
        e_irregular_indices=e_indices,
        g_irregular=g_irregular,
        wieferich=wieferich,
        h_refined_residue=h_residue,
    )


def g_irregular_fast(p: PrimeLike, sieve: Optional[FactorSieve] = None) -> bool:
    """G-irregularity, skipping the Bernoulli kernel when ord_p(4) != (p-1)/2."""
    modulus = prime_modulus(p, sieve)
    _, half = _orders(modulus)
    if not half:
        return True
    return bool(bernoulli_all_mod_p(modulus, sieve).zero_indices())


def q_class(p: PrimeLike, sieve: Optional[FactorSieve] = None) -> QClass:
    """Class of p in Q = {p : ord_p(4) = (p-1)/2}, split by p mod 8."""
    modulus = prime_modulus(p, sieve)
    q = modulus.p
    ord2, half = _orders(modulus)
    if not half:
        return QClass.NOT_IN_Q
    residue = q % 8
    if residue == 1:
        raise InvariantError(f"p={q} = 1 mod 8 cannot satisfy ord_p(4) = (p-1)/2")
    expected_ord2 = q - 1 if residue in (3, 5) else (q - 1) // 2
    if ord2 != expected_ord2:
        raise InvariantError(f"p={q} in Q{residue} but ord_p(2)={ord2}, expected {expected_ord2}")
    return _Q_CLASSES[residue]


def scan_record(p: int, kinds: Iterable[str], sieve: Optional[FactorSieve] = None) -> PrimeRecord:
    """Classify one prime for a scan over the given kinds (B, E, G, Q, W).

    The cheap fields are always filled. Bernoulli work happens for B, and
    for G only when the order criterion cannot decide.
    """
    kinds = set(kinds)
    modulus = prime_modulus(p, sieve)
    bernoulli = euler = None
    need_bernoulli = "B" in kinds
    if not need_bernoulli and "G" in kinds:
        _, half = _orders(modulus)
        need_bernoulli = half
    if need_bernoulli:
        bernoulli = bernoulli_all_mod_p(modulus)
    if "E" in kinds:
        euler = euler_all_mod_p(modulus)
    bundle = SeriesBundle(p=modulus.p, bernoulli=bernoulli, euler=euler)
    return classify_prime(modulus, bundle, sieve)


def first_irregular(kind: str, count: int) -> List[Tuple[int, List[int]]]:
    """The first `count` B-, E- or G-irregular primes with their witnessing indices."""
    kind = kind.upper()
    if kind not in ("B", "E", "G"):
        raise DomainError(f"irregularity kind must be B, E or G, got {kind!r}")
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    found: List[Tuple[int, List[int]]] = []
    limit = 1024
    start = 3
    while len(found) < count:
        sieve = FactorSieve(limit)
        for q in sieve.primes(start, limit):
            q = int(q)
            if kind == "E":
                indices = euler_all_mod_p(q, sieve).zero_indices()
            elif kind == "B":
                indices = bernoulli_all_mod_p(q, sieve).zero_indices()
            else:
                indices = genocchi_all_mod_p(q, sieve).zero_indices()
            if indices:
                found.append((q, indices))
                if len(found) == count:
                    break
        start = limit + 1
        limit *= 2
    logger.debug(f"first {count} {kind}-irregular primes end at {found[-1][0]}")
    return found
