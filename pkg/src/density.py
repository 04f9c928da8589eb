"""Densities of primes with ord_p(4) = (p-1)/2 in residue classes.

delta(d, a) = c(d, a) * R(d, a) * A, where A is Artin's constant,

    R(d, a) = 2 * prod_{q | (a-1, d)} (1 - 1/q) * prod_{q | d} (1 + 1/(q^2 - q - 1))

and c(d, a) follows the mod-8 case table in c_factor.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import List, Optional, Tuple, Union

import mpmath
import sympy

from src.config import Config
from src.errors import DomainError, InvariantError, PrecisionError
from src.modarith import FactorSieve, factorize, product
from src.schemas import DensityResult, FactoredModulus, PrimorialRow, ScanKind

logger = logging.getLogger(__name__)

ModulusLike = Union[int, FactoredModulus]

ARTIN_31_DIGITS = "0.3739558136192022880547280543464"
EULER_GAMMA_50_DIGITS = "0.57721566490153286060651209008240243104215933593992"
DESK_PRIMORIAL_BOUND = 10 ** 6


def _working_dps(digits: Optional[int]) -> int:
    digits = Config.DIGITS if digits is None else digits
    if digits < 1:
        raise DomainError(f"precision must be positive, got {digits}")
    if digits > 100:
        raise PrecisionError(f"{digits} digits is beyond the supported 100")
    return digits + 15


def factored_modulus(d: ModulusLike, sieve: Optional[FactorSieve] = None) -> FactoredModulus:
    """Attach the factorization of d (d = 1 has no factors)."""
    if isinstance(d, FactoredModulus):
        return d
    if d < 1:
        raise DomainError(f"modulus must be positive, got {d}")
    factors = () if d == 1 else tuple(factorize(d, sieve))
    return FactoredModulus(d=d, factors=factors)


def euler_gamma() -> mpmath.mpf:
    """Euler's constant at the current precision."""
    if mpmath.mp.dps <= 48:
        return mpmath.mpf(EULER_GAMMA_50_DIGITS)
    return +mpmath.euler


def artin_constant(digits: Optional[int] = None) -> mpmath.mpf:
    """Artin's constant prod_p (1 - 1/(p(p-1))) to the given number of digits.

    With x = 1/p, log(1 - 1/(p(p-1))) = -sum_{n>=2} (L_n - 1) x^n / n for the
    Lucas numbers L_n. Primes up to Config.ARTIN_CUTOFF enter the product
    explicitly; the rest are summed through prime zeta tails P(n) - sum_{p<=N} p^-n.
    """
    return _artin_constant(_working_dps(digits), Config.ARTIN_CUTOFF)


@lru_cache(maxsize=16)
def _artin_constant(dps: int, cutoff: int) -> mpmath.mpf:
    with mpmath.workdps(dps):
        small = list(sympy.primerange(2, cutoff + 1))
        log_a = mpmath.fsum(mpmath.log(1 - mpmath.mpf(1) / (q * (q - 1))) for q in small)
        tolerance = mpmath.mpf(10) ** (-dps)
        lucas_prev, lucas = 1, 3
        for n in range(2, 10 * dps):
            tail = mpmath.primezeta(n) - mpmath.fsum(mpmath.mpf(q) ** (-n) for q in small)
            term = (lucas - 1) * tail / n
            log_a -= term
            if abs(term) < tolerance:
                break
            lucas_prev, lucas = lucas, lucas + lucas_prev
        else:
            raise PrecisionError(f"prime zeta expansion did not reach {dps} digits")
        value = mpmath.exp(log_a)
    logger.debug(f"Artin constant evaluated to {dps} digits with cutoff {cutoff}")
    return value


def _reduce(modulus: FactoredModulus, a: int) -> int:
    if gcd(a, modulus.d) != 1:
        raise DomainError(f"gcd(a, d) must be 1, got a={a}, d={modulus.d}")
    return a % modulus.d


def c_factor(d: ModulusLike, a: int) -> Fraction:
    """The case factor c(d, a) in {0, 1/2, 3/4, 1}."""
    modulus = factored_modulus(d)
    a = _reduce(modulus, a)
    twos = modulus.exponent_of(2)
    if twos < 2:
        return Fraction(3, 4)
    if twos == 2:
        return Fraction(1, 2) if a % 4 == 1 else Fraction(1)
    return Fraction(0) if a % 8 == 1 else Fraction(1)


def _dividing_primes(n: int, modulus: FactoredModulus) -> List[int]:
    """Primes of d dividing n, tested one at a time so primorial-size d needs no big gcd."""
    return [q for q in modulus.primes if n % q == 0]


def _r_parts(modulus: FactoredModulus, a: int) -> Tuple[int, int]:
    """Unreduced numerator and denominator of R(d, a)."""
    shared = _dividing_primes(a - 1, modulus)
    numerator = 2 * product(q - 1 for q in shared) * product(q * (q - 1) for q in modulus.primes)
    denominator = product(shared) * product(q * q - q - 1 for q in modulus.primes)
    return numerator, denominator


def R_factor(d: ModulusLike, a: int) -> Fraction:
    """R(d, a) as an exact reduced fraction."""
    modulus = factored_modulus(d)
    a = _reduce(modulus, a)
    return Fraction(*_r_parts(modulus, a))


def euler_phi_over_d(d: ModulusLike) -> Fraction:
    """phi(d)/d = prod_{q | d} (1 - 1/q)."""
    modulus = factored_modulus(d)
    return Fraction(product(q - 1 for q in modulus.primes), product(modulus.primes))


def G_factor(d: ModulusLike) -> Fraction:
    """prod_{q | d} (1 + 1/(q^2 - q - 1))."""
    modulus = factored_modulus(d)
    return Fraction(
        product(q * (q - 1) for q in modulus.primes),
        product(q * q - q - 1 for q in modulus.primes),
    )


def F_factor(d: ModulusLike) -> Fraction:
    """phi(d)/d * G(d)."""
    return euler_phi_over_d(d) * G_factor(d)


def delta(d: ModulusLike, a: int, digits: Optional[int] = None) -> DensityResult:
    """delta(d, a) = c(d, a) R(d, a) A with the conjectured G-ratio 1 - delta/sqrt(e).

    Args:
        d: Modulus, plain or already factored
        a: Residue coprime to d
        digits: Working precision (defaults to Config.DIGITS)

    Returns:
        DensityResult; R_over_A_part is None when d has more than
        Config.EXACT_PRIME_CAP distinct primes
    """
    modulus = factored_modulus(d)
    a = _reduce(modulus, a)
    c = c_factor(modulus, a)
    numerator, denominator = _r_parts(modulus, a)
    exact = Fraction(numerator, denominator) if len(modulus.factors) <= Config.EXACT_PRIME_CAP else None

    dps = _working_dps(digits)
    A = artin_constant(digits)
    with mpmath.workdps(dps):
        if c == 0:
            value = mpmath.mpf(0)
        else:
            value = mpmath.mpf(c.numerator * numerator) / mpmath.mpf(c.denominator * denominator) * A
        ratio = 1 - value / mpmath.sqrt(mpmath.e)

    return DensityResult(
        modulus=modulus,
        a=a,
        c=c,
        R_over_A_part=exact,
        delta=value,
        conjectured_g_ratio=ratio,
    )


def conjectured_g_ratio(d: ModulusLike, a: int, digits: Optional[int] = None) -> mpmath.mpf:
    """Expected share of G-irregular primes in the class a mod d: 1 - delta(d, a)/sqrt(e)."""
    return delta(d, a, digits).conjectured_g_ratio


def conjectured_ratio(kind: Union[str, ScanKind], d: ModulusLike, a: int, digits: Optional[int] = None) -> mpmath.mpf:
    """Limit of the experimental ratio of a scan kind in the class a mod d.

    B and E follow the uniform heuristic 1 - 1/sqrt(e), G the Q-corrected
    1 - delta/sqrt(e) and Q the density delta itself.
    """
    kind = ScanKind(kind)
    if kind in (ScanKind.B, ScanKind.E):
        with mpmath.workdps(_working_dps(digits)):
            return 1 - 1 / mpmath.sqrt(mpmath.e)
    if kind == ScanKind.G:
        return conjectured_g_ratio(d, a, digits)
    if kind == ScanKind.Q:
        return delta(d, a, digits).delta
    raise DomainError(f"no conjectured ratio for kind {kind.value}")


def delta_bounds(d: ModulusLike, digits: Optional[int] = None) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """A F(d) <= delta(d, a) <= 2 A G(d) / gcd(2, d) whenever delta(d, a) > 0."""
    modulus = factored_modulus(d)
    A = artin_constant(digits)
    f, g = F_factor(modulus), G_factor(modulus)
    with mpmath.workdps(_working_dps(digits)):
        lower = A * f.numerator / f.denominator
        upper = 2 * A * g.numerator / g.denominator / gcd(2, modulus.d)
    return lower, upper


def primorial_family(n: int, digits: Optional[int] = None, sieve: Optional[FactorSieve] = None) -> PrimorialRow:
    """d_n = prod_{3 <= q <= n} q with a_n = 2 + d_n, or 2 + 3 d_n when d_n = 7 mod 8.

    Returns delta(4 d_n, 1), delta(8 d_n, a_n) and the normalisation
    delta(4 d_n, 1) e^gamma log log(4 d_n).
    """
    if n < 3:
        raise DomainError(f"primorial family needs n >= 3, got {n}")
    if n > DESK_PRIMORIAL_BOUND:
        raise DomainError(f"n={n} is beyond the supported bound {DESK_PRIMORIAL_BOUND}")
    if sieve is None or sieve.limit < n:
        sieve = FactorSieve(n)
    primes = [int(q) for q in sieve.primes(3, n)]
    d_n = product(primes)
    a_n = 2 + 3 * d_n if d_n % 8 == 7 else 2 + d_n

    odd_part = tuple((q, 1) for q in primes)
    base = FactoredModulus(d=d_n, factors=odd_part)
    four = FactoredModulus(d=4 * d_n, factors=((2, 2),) + odd_part)
    eight = FactoredModulus(d=8 * d_n, factors=((2, 3),) + odd_part)

    if a_n % 8 == 1:
        raise InvariantError(f"a_n = 1 mod 8 for n={n}")
    if a_n % 2 == 0 or _dividing_primes(a_n, base):
        raise InvariantError(f"gcd(a_n, 8 d_n) != 1 for n={n}")
    if _dividing_primes(a_n - 1, base):
        raise InvariantError(f"gcd(a_n - 1, 8 d_n) is not a power of two for n={n}")

    low = delta(four, 1, digits)
    high = delta(eight, a_n, digits)
    with mpmath.workdps(_working_dps(digits)):
        normalization = low.delta * mpmath.exp(euler_gamma()) * mpmath.log(mpmath.log(mpmath.mpf(4 * d_n)))
    logger.info(f"Primorial family n={n}: {len(primes)} odd primes, d_n has {d_n.bit_length()} bits")
    return PrimorialRow(
        n=n,
        d_n=base,
        a_n=a_n,
        delta_4dn_1=low,
        delta_8dn_an=high,
        normalization=normalization,
    )


def truncate_decimal(value: Union[mpmath.mpf, Fraction, int, float], places: int = 6) -> str:
    """Fixed-point rendering that keeps the first `places` decimals and drops the rest."""
    scale = 10 ** places
    if isinstance(value, Fraction):
        scaled = abs(value.numerator) * scale // value.denominator
        negative = value < 0
    else:
        with mpmath.workdps(60):
            value = mpmath.mpf(value)
            scaled = int(mpmath.floor(abs(value) * scale))
            negative = value < 0
    sign = "-" if negative and scaled else ""
    return f"{sign}{scaled // scale}.{scaled % scale:0{places}d}"
