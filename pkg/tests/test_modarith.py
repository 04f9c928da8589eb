"""Tests for modarith module."""

import pytest
import sympy

from src.config import Config
from src.errors import DomainError, ResourceLimitError
from src.modarith import (
    FactorSieve,
    factorize,
    fermat_quotient_2,
    is_prime,
    is_wieferich,
    multiplicative_order,
    ord4_from_ord2,
    ord4_is_half,
    pow_mod,
    prime_modulus,
    product,
)


@pytest.fixture(scope="module")
def sieve():
    """Sieve shared by the module."""
    return FactorSieve(100_000)


def test_pow_mod():
    """Test modular exponentiation."""
    assert pow_mod(2, 10, 1000) == 24
    assert pow_mod(3, 0, 7) == 1
    assert pow_mod(2, 1092, 1093 ** 2) == 1


def test_pow_mod_rejects_small_modulus():
    """Test that m < 2 is rejected."""
    with pytest.raises(DomainError):
        pow_mod(2, 3, 1)


def test_product_tree():
    """Test balanced product."""
    assert product([]) == 1
    assert product([3, 5, 7]) == 105
    assert product(range(1, 11)) == 3628800


def test_prime_count(sieve):
    """Test pi(x), counting 2."""
    assert sieve.prime_count(10) == 4
    assert sieve.prime_count(100_000) == 9592


def test_sieve_matches_sympy(sieve):
    """Test sieve primes against sympy."""
    assert list(sieve.primes(2, 2000)) == list(sympy.primerange(2, 2001))
    assert list(sieve.primes(90, 110)) == [97, 101, 103, 107, 109]


def test_sieve_range_checks(sieve):
    """Test bounds beyond the sieve."""
    with pytest.raises(DomainError):
        sieve.prime_count(100_001)
    with pytest.raises(DomainError):
        FactorSieve(1)


def test_sieve_memory_cap(monkeypatch):
    """Test the memory cap."""
    monkeypatch.setattr(Config, 'SIEVE_MAX_LIMIT', 1000)
    with pytest.raises(ResourceLimitError):
        FactorSieve(1001)


def test_factorize(sieve):
    """Test factorization in and beyond the sieve range."""
    assert factorize(360, sieve) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(2 ** 61 - 2) == sorted(sympy.factorint(2 ** 61 - 2).items())
    with pytest.raises(DomainError):
        factorize(1)


def test_is_prime(sieve):
    """Test primality with and without the sieve."""
    assert is_prime(99991, sieve)
    assert not is_prime(99993, sieve)
    assert is_prime(2 ** 61 - 1)


def test_prime_modulus():
    """Test prime modulus construction."""
    modulus = prime_modulus(13)
    assert modulus.p == 13
    assert modulus.p_minus_1_factorization == ((2, 2), (3, 1))

    for bad in (2, 9, 1):
        with pytest.raises(DomainError):
            prime_modulus(bad)


def test_multiplicative_order(sieve):
    """Test ord_p(g) against sympy."""
    for p in sieve.primes(3, 3000):
        p = int(p)
        for g in (2, 3, 4):
            if p == g:
                continue
            assert multiplicative_order(g, p, sieve).order == sympy.n_order(g, p)


def test_order_requires_coprime_base():
    """Test gcd(g, p) != 1."""
    with pytest.raises(DomainError):
        multiplicative_order(7, 7)


def test_ord4_is_half():
    """Test ord_p(4) = (p-1)/2 on small primes."""
    # ord_3(4) = 1, ord_5(4) = 2, ord_7(4) = 3, ord_17(4) = 4
    assert ord4_is_half(3)
    assert ord4_is_half(5)
    assert ord4_is_half(7)
    assert not ord4_is_half(17)
    assert not ord4_is_half(31)


def test_ord4_from_ord2(sieve):
    """Test ord_p(4) derived from ord_p(2) for p <= 10^5."""
    for p in sieve.primes(3, 100_000):
        p = int(p)
        ord2 = multiplicative_order(2, p, sieve).order
        assert ord4_from_ord2(ord2) == multiplicative_order(4, p, sieve).order


def test_fermat_quotient():
    """Test q_2(p) for small primes."""
    assert fermat_quotient_2(3) == 1
    assert fermat_quotient_2(5) == 3
    assert fermat_quotient_2(7) == 2


def test_wieferich_primes(sieve):
    """Test that 1093 and 3511 are the Wieferich primes below 10^5."""
    found = [int(p) for p in sieve.primes(3, 100_000) if is_wieferich(int(p))]
    assert found == [1093, 3511]


def test_fermat_quotient_rejects_large_p():
    """Test the p^2 < 2^62 bound."""
    with pytest.raises(DomainError):
        fermat_quotient_2(2 ** 31 + 11)
